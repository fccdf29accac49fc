import netroute
from netroute.router import ResistanceModel, WireClassCombo, choose_combo

from .base import TestNetroute


class TestRouterChooseCombo(TestNetroute):

    def test_short(self):
        model = ResistanceModel()
        self.assertEqual([model.cost(combo, 5) for combo in WireClassCombo], [5.0, 8.0, 12.25])
        self.assertIs(choose_combo(5), WireClassCombo.M3M4)

    def test_tie_goes_lower(self):
        self.assertIs(choose_combo(11), WireClassCombo.M3M4)
        self.assertIs(choose_combo(22), WireClassCombo.M4M5)

    def test_long(self):
        model = ResistanceModel()
        self.assertEqual([model.cost(combo, 24) for combo in WireClassCombo], [24.0, 17.5, 17.0])
        self.assertIs(choose_combo(24), WireClassCombo.M5M6)

    def test_break_points(self):
        combos = [choose_combo(length) for length in range(1, 64)]
        self.assertEqual(combos, sorted(combos))
        changes = [length for length in range(2, 64) if combos[length - 1] != combos[length - 2]]
        self.assertEqual(changes, [12, 23])

    def test_break_even(self):
        model = ResistanceModel()
        self.assertEqual(model.break_even(WireClassCombo.M3M4, WireClassCombo.M4M5), 11.0)
        self.assertEqual(model.break_even(WireClassCombo.M4M5, WireClassCombo.M5M6), 22.0)
        balanced = ResistanceModel.balanced()
        self.assertEqual(balanced.break_even(WireClassCombo.M3M4, WireClassCombo.M4M5), 30.0)
        self.assertEqual(balanced.break_even(WireClassCombo.M4M5, WireClassCombo.M5M6), 45.0)

    def test_custom_model(self):
        model = ResistanceModel(rates=(1.0, 0.5, 0.25), overheads=(0.0, 1.0, 2.0))
        self.assertIs(choose_combo(5, model), WireClassCombo.M5M6)

    def test_invalid_length(self):
        with self.assertRaises(netroute.ValidationError):
            choose_combo(0)

    def test_invalid_model(self):
        for rates, overheads in (
                ((1.0, 1.0, 0.5), (0.0, 1.0, 2.0)),
                ((1.0, 0.5, 0.25), (0.0, 2.0, 1.0)),
                ((1.0, 0.5), (0.0, 2.0)),
                ((1.0, 0.5, 0.0), (0.0, 1.0, 2.0)),
                ((1.0, 0.5, 0.25), (-1.0, 1.0, 2.0)),
        ):
            with self.assertRaises(netroute.ValidationError):
                ResistanceModel(rates, overheads)

    def test_combo_layers(self):
        self.assertEqual(
            [(combo.vertical_metal.name, combo.horizontal_metal.name, combo.via.name) for combo in WireClassCombo],
            [('M3', 'M4', 'VIA3'), ('M5', 'M4', 'VIA4'), ('M5', 'M6', 'VIA5')]
        )
