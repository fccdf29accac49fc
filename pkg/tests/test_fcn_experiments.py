'''
Long training runs that check the network's learning behavior end to end.
Each takes minutes to hours on a CPU; they are skipped unless
``NETROUTE_SLOW=1`` is set or ``slow = 1`` in tests/netroute.ini.
'''
import logging

import pytest

from netroute.fcn import FcnConfig, build, evaluate, fit, train_step
from netroute.layout import GridDims

from .base import TestNetroute

_LOGGER = logging.getLogger(__name__)

FULL_GRID = GridDims(32, 32)


@pytest.mark.slow
class TestFcnExperiments(TestNetroute):

    def setUp(self):
        super(TestFcnExperiments, self).setUp()
        self.skip_unless_slow()

    def test_overfit_tiny_dataset(self):
        seeds = self.get_option('overfit_seeds', int)
        steps = self.get_option('overfit_steps', int)
        succeeded = 0
        for seed in range(seeds):
            dataset = self.small_dataset(4, seed=seed, dims=FULL_GRID)
            data = dataset.data(range(4)).astype('float32')
            labels = dataset.labels(range(4)).astype('float32')
            model = build(seed=seed)
            for step in range(1, steps + 1):
                train_step(model, data, labels)
                if step % 100 == 0 and evaluate(model, dataset, batch_size=4).f1 == 1.0:
                    _LOGGER.info('seed %d: F1 = 1 after %d steps', seed, step)
                    succeeded += 1
                    break
        self.assertGreaterEqual(succeeded, seeds - 1)

    def test_first_stage_filter(self):
        samples = self.get_option('first_stage_samples', int)
        epochs = self.get_option('first_stage_epochs', int)
        seeds = self.get_option('first_stage_seeds', int)
        wide_wins = 0
        for seed in range(seeds):
            train = self.small_dataset(samples, seed=100 + seed, dims=FULL_GRID)
            scores = {}
            for first_filter in (3, 33):
                model = build(FcnConfig(first_filter=first_filter), seed=seed)
                scores[first_filter] = fit(model, train, epochs, seed=seed)[-1].f1
            _LOGGER.info('seed %d: train F1 %.3f (F1=3) vs %.3f (F1=33)', seed, scores[3], scores[33])
            if scores[33] - scores[3] >= 0.20:
                wide_wins += 1
        self.assertGreaterEqual(wide_wins, 2 if seeds >= 3 else seeds)

    def test_small_dataset_training(self):
        train = self.small_dataset(self.get_option('final_train_samples', int), seed=1000, dims=FULL_GRID)
        val = self.small_dataset(self.get_option('final_val_samples', int), seed=2000, dims=FULL_GRID)
        rows = fit(build(seed=0), train, self.get_option('final_epochs', int), val=val)
        final_train = [row for row in rows if row.split == 'train'][-1]
        self.assertGreaterEqual(final_train.f1, 0.80)
