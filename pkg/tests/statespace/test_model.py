import numpy as np
import pytest

from forge.exception import ForgeKeyError
from forge.printer import PrettyPrinter
from forge.statespace import GateModel, GateScheme, Pulse, EffectiveVdwControls, HamiltonianBlock, Sector
from forge.statespace import ModelValidationError
from tests.testers import PrettyPrinterTester, EnumTester


class TestSector(EnumTester):

    @property
    def cls(self) -> type[Sector]:
        return Sector

    def test_labels(self):
        assert Sector.S01.label == "01"
        assert Sector.S10.label == "10"
        assert Sector.S11.label == "11"
        assert Sector.FULL.label == "full"

        assert Sector.parse("01") == Sector.S01
        assert Sector.parse(" 11 ") == Sector.S11
        assert Sector.parse("full") == Sector.FULL


class TestGateScheme(EnumTester):

    @property
    def cls(self) -> type[GateScheme]:
        return GateScheme


class TestGateModel(PrettyPrinterTester):

    @pytest.fixture
    def obj(self, model: GateModel) -> PrettyPrinter:
        return model

    def test_coerces_values(self):
        model = GateModel(j_exchange=5, v11=1, scheme="blockade", infinite_j=1)
        assert isinstance(model.j_exchange, float)
        assert isinstance(model.v11, float)
        assert model.scheme == GateScheme.BLOCKADE
        assert model.infinite_j is True

    @pytest.mark.parametrize("kwargs,field", [
        ({"omega_o": -1.0}, "omega_o"),
        ({"gamma_1": -0.1}, "gamma_1"),
        ({"gamma_2": -0.1}, "gamma_2"),
        ({"j_exchange": 0.0}, "j_exchange"),
        ({"v22": float("nan")}, "v22"),
        ({"delta_o": float("inf")}, "delta_o"),
    ])
    def test_validation(self, kwargs: dict, field: str):
        with pytest.raises(ModelValidationError) as exc:
            GateModel(**kwargs)
        assert exc.value.field == field

    def test_infinite_j_allows_any_exchange(self):
        assert GateModel(j_exchange=0.0, infinite_j=True).infinite_j
        assert GateModel(j_exchange=0.0, scheme=GateScheme.BLOCKADE).scheme == GateScheme.BLOCKADE

    def test_fluctuation_scaling(self, model: GateModel):
        fluctuated = model.with_fluctuation(0.01)
        assert fluctuated.j_exchange == pytest.approx(model.j_exchange * 0.97)
        assert fluctuated.v11 == pytest.approx(model.v11 * 0.94)
        assert fluctuated.v12 == pytest.approx(model.v12 * 0.94)
        assert fluctuated.v22 == pytest.approx(model.v22 * 0.94)
        assert fluctuated.delta_o == model.delta_o
        assert model.with_fluctuation(0.0) == model

    def test_decay(self, model: GateModel):
        assert not model.has_decay
        decaying = GateModel(gamma_1=0.01)
        assert decaying.has_decay
        assert not decaying.without_decay().has_decay


class TestPulse(PrettyPrinterTester):

    @pytest.fixture
    def obj(self, pulse: Pulse) -> PrettyPrinter:
        return pulse

    def test_properties(self, pulse: Pulse):
        assert pulse.n_steps == 12
        assert pulse.dt == pytest.approx(0.5)
        assert np.allclose(pulse.midpoints(), np.arange(12) * 0.5 + 0.25)
        assert len(pulse.grid()) == 13
        assert pulse.grid()[-1] == pulse.total_time

    def test_samples_are_read_only(self, pulse: Pulse):
        with pytest.raises(ValueError):
            pulse.phi_mw[0] = 1.0

        source = np.ones(4)
        copied = Pulse(total_time=1.0, controls={"omega_mw": source})
        source[0] = 5.0
        assert copied.omega_mw[0] == 1.0

    def test_validation(self):
        with pytest.raises(ModelValidationError) as exc:
            Pulse(total_time=1.0, controls={"phi_mw": np.zeros(5), "omega_mw": np.ones(4)})
        assert exc.value.field == "omega_mw"
        assert "expected 5 samples, got 4" in str(exc.value)

        with pytest.raises(ModelValidationError):
            Pulse(total_time=1.0, controls={"omega_mw": [1.0, -0.5]})
        with pytest.raises(ModelValidationError):
            Pulse(total_time=-1.0, controls={"phi_mw": [0.0]})
        with pytest.raises(ModelValidationError):
            Pulse(total_time=1.0, controls={})
        with pytest.raises(ModelValidationError):
            Pulse(total_time=1.0, controls={"phi_mw": [0.0, np.nan]})

    def test_missing_control(self, pulse: Pulse):
        with pytest.raises(ForgeKeyError):
            pulse.control("inv_tau")

    def test_copies(self, pulse: Pulse):
        stretched = pulse.with_time(12.0)
        assert stretched.dt == pytest.approx(1.0)
        assert np.array_equal(stretched.phi_mw, pulse.phi_mw)

        replaced = pulse.with_controls(omega_mw=np.zeros(12))
        assert np.array_equal(replaced.omega_mw, np.zeros(12))
        assert np.array_equal(replaced.phi_mw, pulse.phi_mw)

        scalars = pulse.with_scalars(theta=0.5)
        assert scalars.theta == 0.5
        assert scalars.delta_o == pulse.delta_o

    def test_resample_hold(self, pulse: Pulse):
        refined = pulse.resampled(36, kind="hold")
        assert refined.n_steps == 36
        assert refined.total_time == pulse.total_time
        assert np.array_equal(refined.phi_mw, np.repeat(pulse.phi_mw, 3))

    def test_resample_linear(self, pulse: Pulse):
        same = pulse.resampled(pulse.n_steps, kind="linear")
        assert np.allclose(same.omega_mw, pulse.omega_mw)

        refined = pulse.resampled(24, kind="linear")
        assert refined.omega_mw.min() >= pulse.omega_mw.min()
        assert refined.omega_mw.max() <= pulse.omega_mw.max()

        with pytest.raises(ModelValidationError):
            pulse.resampled(24, kind="cubic")
        with pytest.raises(ModelValidationError):
            pulse.resampled(0)


class TestEffectiveVdwControls(PrettyPrinterTester):

    @pytest.fixture
    def obj(self) -> PrettyPrinter:
        return EffectiveVdwControls(inv_tau=np.linspace(-2, 2, 8), delta_o=0.3, theta=1.0)

    def test_effective_terms(self):
        controls = EffectiveVdwControls(inv_tau=[4.0, 0.0, -2.0], delta_o=0.5)
        assert np.allclose(controls.v, [-2.0, 0.0, 1.0])
        assert np.allclose(controls.delta, [-0.5, 0.5, 1.0])

    def test_pulse_conversion(self):
        controls = EffectiveVdwControls(inv_tau=[1.0, 2.0, 3.0], delta_o=0.2, theta=0.7)
        pulse = controls.to_pulse(total_time=4.0)
        assert pulse.total_time == 4.0
        assert tuple(pulse.controls) == ("inv_tau",)

        restored = EffectiveVdwControls.from_pulse(pulse)
        assert np.array_equal(restored.inv_tau, controls.inv_tau)
        assert restored.delta_o == controls.delta_o
        assert restored.theta == controls.theta


class TestHamiltonianBlock(PrettyPrinterTester):

    @pytest.fixture
    def obj(self) -> PrettyPrinter:
        return HamiltonianBlock(labels=("01", "0r1"), matrix=[[0, 0.5], [0.5, -1]], sector="01")

    def test_block(self, obj: HamiltonianBlock):
        assert obj.sector == Sector.S01
        assert obj.dim == 2
        assert obj.index("0r1") == 1
        assert np.array_equal(obj.excitations, [0, 1])
        assert obj.is_hermitian()

        with pytest.raises(ForgeKeyError):
            obj.index("11")

    def test_non_hermitian(self):
        block = HamiltonianBlock(labels=("r1r2+", "r2r2"), matrix=[[-0.5j, 0], [0, 0]], sector=Sector.S11)
        assert not block.is_hermitian()
        assert np.array_equal(block.excitations, [2, 2])

    def test_shape_mismatch(self):
        with pytest.raises(ModelValidationError):
            HamiltonianBlock(labels=("01",), matrix=np.eye(2))
