"""
Pytest conftest.py, loaded before test collection begins.

Registers the hypothesis profiles used by the property tests. Select one
with ``--hypothesis-profile`` or the ``HYPOTHESIS_PROFILE`` environment
variable; ``fast`` is the default.
"""
import os

import hypothesis
import numpy as np

np.seterr(all='warn')

hypothesis.settings.register_profile('fast', max_examples=25, deadline=None)
hypothesis.settings.register_profile('ci', max_examples=200, deadline=None)
hypothesis.settings.register_profile('debugger', report_multiple_bugs=False, deadline=None)
hypothesis.settings.load_profile(os.environ.get('HYPOTHESIS_PROFILE', 'fast'))
