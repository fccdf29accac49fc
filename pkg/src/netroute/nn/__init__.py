'''
Numeric building blocks for the routing network: convolution, batch
normalization, leaky ReLU, the weighted loss, Adam, initialization and
gradient checking. Tensors are rank-4 ``numpy`` arrays ``(n, c, h, w)``.
'''
from .activation import DEFAULT_SLOPE, leaky_relu, leaky_relu_backward
from .batchnorm import EVAL, TRAIN, BatchNormCache, BatchNormLayer, batchnorm, batchnorm_backward
from .conv import ConvLayer, conv2d_backward, conv2d_forward
from .gradcheck import DEFAULT_TOLERANCE, GradCheckReport, grad_check, relative_error
from .init import fan_in_bound, init_weights
from .loss import LossConfig, l2_penalty, weighted_xent
from .optim import AdamState, adam_step
