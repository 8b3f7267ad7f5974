from dataclasses import replace

import numpy as np
import pytest
from scipy.linalg import expm

from forge.statespace import GateModel, Pulse, EffectiveVdwControls, Sector, SectorError, ModelValidationError
from forge.statespace import build_full_hamiltonian, lab_frame_block, rotated_frame_block, blockade_block
from forge.statespace import build_effective_vdw_blocks, project_infinite_j, phase_to_detuning
from forge.statespace import sector_isometry, swap_operator
from tests.utils import idfn


def random_models(count: int, seed: int = 42) -> list[tuple[GateModel, float, float]]:
    rng = np.random.default_rng(seed)
    return [
        (
            GateModel(
                delta_o=rng.uniform(-2, 2),
                j_exchange=rng.uniform(0.1, 100),
                v11=rng.uniform(-1, 1),
                v12=rng.uniform(-1, 1),
                v22=rng.uniform(-1, 1),
            ),
            rng.uniform(0, 10),
            rng.uniform(-np.pi, np.pi),
        )
        for _ in range(count)
    ]


@pytest.mark.parametrize("model,omega_mw,phi_mw", random_models(25))
def test_full_hamiltonian_is_hermitian_and_exchange_symmetric(model: GateModel, omega_mw: float, phi_mw: float):
    block = build_full_hamiltonian(model, omega_mw=omega_mw, phi_mw=phi_mw)
    assert block.dim == 16
    assert block.sector == Sector.FULL
    assert block.is_hermitian(atol=1e-12)

    swap = swap_operator()
    assert np.allclose(swap @ block.matrix, block.matrix @ swap, atol=1e-12)


@pytest.mark.parametrize("sector", [Sector.S01, Sector.S10, Sector.S11], ids=idfn)
@pytest.mark.parametrize("model,omega_mw,phi_mw", random_models(5, seed=7))
def test_sector_blocks_match_full_space(model: GateModel, omega_mw: float, phi_mw: float, sector: Sector):
    full = build_full_hamiltonian(model, omega_mw=omega_mw, phi_mw=phi_mw).matrix
    block = lab_frame_block(model, omega_mw=omega_mw, phi_mw=phi_mw, sector=sector)
    labels, isometry = sector_isometry(sector)

    assert block.labels == labels
    assert np.allclose(block.matrix, isometry.conj().T @ full @ isometry, atol=1e-12)

    # the sector is invariant under the full Hamiltonian
    outside = full @ isometry - isometry @ block.matrix
    assert np.allclose(outside, 0, atol=1e-12)


def test_lab_frame_matrix_elements():
    model = GateModel(delta_o=0.3, j_exchange=4.0, v11=0.1, v12=0.2, v22=0.5)
    block = lab_frame_block(model, omega_mw=2.0, phi_mw=0.7, sector="01")
    h = block.matrix

    assert h[block.index("01"), block.index("0r1")] == pytest.approx(0.5)
    assert h[block.index("0r1"), block.index("0r1")] == pytest.approx(-0.3)
    assert h[block.index("0r1"), block.index("0r2")] == pytest.approx(np.exp(0.7j))

    block = lab_frame_block(model, omega_mw=0.0, phi_mw=0.0, sector="11")
    h = block.matrix
    assert h[block.index("r1r1"), block.index("r1r1")] == pytest.approx(-0.6 + 0.1)
    assert h[block.index("r1r2+"), block.index("r1r2+")] == pytest.approx(-0.6 + 0.2 + 4.0)
    assert h[block.index("r2r2"), block.index("r2r2")] == pytest.approx(-0.6 + 0.5)


def test_decay_is_anti_hermitian():
    model = GateModel(gamma_1=0.02, gamma_2=0.04)
    block = lab_frame_block(model, omega_mw=1.0, phi_mw=0.0, sector=Sector.S01)
    assert not block.is_hermitian()

    anti = (block.matrix - block.matrix.conj().T) / 2j
    assert np.allclose(np.diag(anti), [0, -0.01, -0.02])


def test_rotated_frame_matches_lab_frame_at_zero_phase(model: GateModel):
    for sector in (Sector.S01, Sector.S10, Sector.S11):
        rotated = rotated_frame_block(model, omega_mw=1.5, delta_mw=0.0, sector=sector)
        lab = lab_frame_block(model, omega_mw=1.5, phi_mw=0.0, sector=sector)
        assert np.allclose(rotated.matrix, lab.matrix)


def test_rotated_frame_detuning_and_laser(model: GateModel):
    block = rotated_frame_block(model, omega_mw=1.0, delta_mw=0.8, sector="01", laser=False)
    h = block.matrix
    assert h[block.index("01"), block.index("0r1")] == 0
    assert h[block.index("0r2"), block.index("0r2")] == pytest.approx(-0.8)

    with pytest.raises(SectorError):
        rotated_frame_block(model, omega_mw=1.0, delta_mw=0.0, sector=Sector.FULL)
    with pytest.raises(ModelValidationError):
        rotated_frame_block(model, omega_mw=np.nan, delta_mw=0.0, sector=Sector.S01)


def test_infinite_j_projection(model: GateModel):
    block = lab_frame_block(model, omega_mw=2.0, phi_mw=0.1, sector=Sector.S11)
    projected = project_infinite_j(block)
    assert projected.labels == ("11", "1r1+", "1r2+", "r1r1")
    assert np.allclose(projected.matrix, block.matrix[:4, :4])

    infinite = replace(model, infinite_j=True)
    assert lab_frame_block(infinite, omega_mw=2.0, phi_mw=0.1, sector=Sector.S11).labels == projected.labels
    assert lab_frame_block(infinite, omega_mw=2.0, phi_mw=0.1, sector=Sector.S01).dim == 3

    with pytest.raises(SectorError):
        project_infinite_j(projected)
    with pytest.raises(SectorError):
        project_infinite_j(lab_frame_block(model, omega_mw=2.0, phi_mw=0.1, sector=Sector.S01))
    with pytest.raises(ModelValidationError):
        build_full_hamiltonian(infinite, omega_mw=1.0, phi_mw=0.0)


def test_infinite_j_projection_approximates_large_exchange():
    large = GateModel(j_exchange=1e4, v11=0.1, v12=0.1, v22=0.1)
    infinite = replace(large, infinite_j=True)
    time = np.pi

    full = rotated_frame_block(large, omega_mw=2.0, delta_mw=0.0, sector=Sector.S11)
    projected = rotated_frame_block(infinite, omega_mw=2.0, delta_mw=0.0, sector=Sector.S11)

    amplitude_full = expm(-1j * time * full.matrix)[full.index("11"), full.index("11")]
    amplitude_projected = expm(-1j * time * projected.matrix)[projected.index("11"), projected.index("11")]
    assert abs(amplitude_full - amplitude_projected) < 1e-2


def test_blockade_block():
    block = blockade_block(omega_o=1.0, delta=0.2, v=3.0, sector="11", phi_o=np.pi / 2)
    h = block.matrix
    assert block.labels == ("11", "1r+", "rr")
    assert block.is_hermitian()
    assert h[block.index("rr"), block.index("rr")] == pytest.approx(-0.4 + 3.0)
    assert h[block.index("11"), block.index("1r+")] == pytest.approx(1j * np.sqrt(2) / 2)


@pytest.mark.parametrize("inv_tau", [-50.0, -1.0, 0.0, 0.3, 20.0], ids=idfn)
def test_effective_doubly_excited_shift_cancels(inv_tau: float):
    controls = EffectiveVdwControls(inv_tau=[inv_tau], delta_o=0.0)
    single, double = build_effective_vdw_blocks(controls, omega_o=1.0, step=0)

    assert single.dim == 2
    assert double.dim == 3
    assert double.matrix[double.index("rr"), double.index("rr")] == pytest.approx(0.0, abs=1e-12)
    assert single.matrix[single.index("0r"), single.index("0r")] == pytest.approx(inv_tau / 4)


def test_effective_blocks_step_bounds():
    controls = EffectiveVdwControls(inv_tau=[0.0, 1.0])
    with pytest.raises(ModelValidationError):
        build_effective_vdw_blocks(controls, omega_o=1.0, step=2)


def test_phase_to_detuning():
    n_steps = 20
    t = (np.arange(n_steps) + 0.5) / n_steps * 4.0
    pulse = Pulse(total_time=4.0, controls={"phi_mw": 1.5 * t - 0.3, "omega_mw": np.ones(n_steps)})
    assert np.allclose(phase_to_detuning(pulse), 1.5, atol=1e-12)

    pulse = Pulse(total_time=4.0, controls={"phi_mw": 0.5 * t ** 2, "omega_mw": np.ones(n_steps)})
    assert np.allclose(phase_to_detuning(pulse)[1:-1], t[1:-1])

    with pytest.raises(ModelValidationError):
        phase_to_detuning(Pulse(total_time=1.0, controls={"phi_mw": [0.0]}))
    with pytest.raises(ModelValidationError):
        phase_to_detuning(Pulse(total_time=0.0, controls={"phi_mw": [0.0, 1.0]}))
