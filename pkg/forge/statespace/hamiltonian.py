"""
Hamiltonian builders for every level scheme, in the lab and rotated frames.

Every Hamiltonian is a real-linear combination of a fixed set of operator terms.
Terms are built once per level scheme, projected once per sector, and cached as read-only arrays.
"""
import logging
from collections.abc import Mapping
from functools import cache
from types import MappingProxyType

import numpy as np

from forge.logger import ForgeLogger
from forge.statespace.basis import FOUR_LEVEL_STATES, BLOCKADE_STATES, TWO_PHOTON_STATES
from forge.statespace.basis import on_both, projector, transition, pair_projector, pair_transition, sector_isometry
from forge.statespace.exception import SectorError, ModelValidationError
from forge.statespace.model import GateModel, HamiltonianBlock, Sector, EffectiveVdwControls, Pulse
from forge.types import ComplexArray, RealArray

log: ForgeLogger = logging.getLogger(__name__)

type OperatorTerms = Mapping[str, ComplexArray]

#: Pair states removed from the ``11`` sector in the J -> infinity limit
INFINITE_J_EXCLUDED: tuple[str, ...] = ("r1r2+", "r2r2")


###########################################################################
## Operator terms
###########################################################################
def _freeze(terms: dict[str, ComplexArray]) -> OperatorTerms:
    for matrix in terms.values():
        matrix.setflags(write=False)
    return MappingProxyType(terms)


def _quadratures(states: tuple[str, ...], lower: str, upper: str) -> tuple[ComplexArray, ComplexArray]:
    """
    The x and y quadratures of a drive on ``lower`` <-> ``upper`` summed over both atoms.

    A drive Ω/2 (e^{iφ}|lower><upper| + h.c.) equals Ω (cos φ·x + sin φ·y).
    """
    down = transition(states, lower, upper)
    return on_both((down + down.conj().T) / 2), on_both(1j * (down - down.conj().T) / 2)


def _rydberg_pair_terms(states: tuple[str, ...]) -> dict[str, ComplexArray]:
    return {
        "exchange": pair_transition(states, ("r1", "r2"), ("r2", "r1"))
                    + pair_transition(states, ("r2", "r1"), ("r1", "r2")),
        "v11": pair_projector(states, "r1", "r1"),
        "v12": pair_projector(states, "r1", "r2") + pair_projector(states, "r2", "r1"),
        "v22": pair_projector(states, "r2", "r2"),
        "decay_1": -0.5j * on_both(projector(states, "r1")),
        "decay_2": -0.5j * on_both(projector(states, "r2")),
    }


@cache
def four_level_terms() -> OperatorTerms:
    """Operator terms of two four-level atoms over {|0>,|1>,|r1>,|r2>}⊗²"""
    states = FOUR_LEVEL_STATES
    laser_x, laser_y = _quadratures(states, "1", "r1")
    mw_x, mw_y = _quadratures(states, "r1", "r2")
    return _freeze({
        "laser_x": laser_x,
        "laser_y": laser_y,
        "detuning": -on_both(projector(states, "r1", "r2")),
        "mw_x": mw_x,
        "mw_y": mw_y,
        "mw_detuning": -on_both(projector(states, "r2")),
        **_rydberg_pair_terms(states),
    })


@cache
def blockade_terms() -> OperatorTerms:
    """Operator terms of two three-level atoms with a single Rydberg level"""
    states = BLOCKADE_STATES
    laser_x, laser_y = _quadratures(states, "1", "r")
    return _freeze({
        "laser_x": laser_x,
        "laser_y": laser_y,
        "detuning": -on_both(projector(states, "r")),
        "v11": pair_projector(states, "r", "r"),
        "decay_1": -0.5j * on_both(projector(states, "r")),
    })


@cache
def two_photon_terms() -> OperatorTerms:
    """Operator terms of two five-level atoms where |r1> is reached through the intermediate level |e>"""
    states = TWO_PHOTON_STATES
    probe_x, _ = _quadratures(states, "1", "e")
    coupling_x, _ = _quadratures(states, "e", "r1")
    mw_x, mw_y = _quadratures(states, "r1", "r2")
    return _freeze({
        "probe": probe_x,
        "coupling": coupling_x,
        "e_detuning": -on_both(projector(states, "e")),
        "detuning": -on_both(projector(states, "r1", "r2")),
        "mw_x": mw_x,
        "mw_y": mw_y,
        "mw_detuning": -on_both(projector(states, "r2")),
        "decay_e": -0.5j * on_both(projector(states, "e")),
        **_rydberg_pair_terms(states),
    })


_TERM_BUILDERS = {
    FOUR_LEVEL_STATES: four_level_terms,
    BLOCKADE_STATES: blockade_terms,
    TWO_PHOTON_STATES: two_photon_terms,
}


def operator_terms(states: tuple[str, ...] = FOUR_LEVEL_STATES) -> OperatorTerms:
    """Get the cached product-space operator terms for the level scheme ``states``"""
    try:
        return _TERM_BUILDERS[states]()
    except KeyError:
        raise SectorError(f"No operator terms defined for levels {states}")


@cache
def sector_terms(
        sector: Sector, states: tuple[str, ...] = FOUR_LEVEL_STATES, infinite_j: bool = False
) -> tuple[tuple[str, ...], OperatorTerms]:
    """
    Project every operator term of a level scheme onto ``sector``.

    :param infinite_j: Additionally drop the pair states coupled only through the exchange term.
        Only valid for the ``11`` sector.
    :return: The sector labels and the projected terms.
    """
    labels, isometry = sector_isometry(sector, states)
    terms = {name: isometry.conj().T @ matrix @ isometry for name, matrix in operator_terms(states).items()}

    if infinite_j and sector == Sector.S11:
        keep = _infinite_j_keep(labels)
        labels = tuple(labels[i] for i in keep)
        terms = {name: matrix[np.ix_(keep, keep)] for name, matrix in terms.items()}
    elif infinite_j and sector == Sector.FULL:
        raise SectorError("The infinite-J projection is only defined on the reduced 11 sector")

    return labels, _freeze(terms)


def _infinite_j_keep(labels: tuple[str, ...]) -> list[int]:
    return [i for i, label in enumerate(labels) if label not in INFINITE_J_EXCLUDED]


def combine(terms: OperatorTerms, coefficients: Mapping[str, float]) -> ComplexArray:
    """The linear combination Σ c_k·T_k of the named ``terms``"""
    first = next(iter(terms.values()))
    matrix = np.zeros_like(first)
    for name, value in coefficients.items():
        if value:
            matrix = matrix + value * terms[name]
    return matrix


def static_coefficients(model: GateModel, laser: bool = True) -> dict[str, float]:
    """
    The control-independent coefficients of the four-level model.

    :param laser: Whether the optical drive is on.
    """
    return {
        "laser_x": model.omega_o if laser else 0.0,
        "detuning": model.delta_o,
        "exchange": 0.0 if model.infinite_j else model.j_exchange,
        "v11": model.v11,
        "v12": model.v12,
        "v22": model.v22,
        "decay_1": model.gamma_1,
        "decay_2": model.gamma_2,
    }


###########################################################################
## Builders
###########################################################################
def _check_controls(**controls: float) -> None:
    for name, value in controls.items():
        if not np.isfinite(value):
            raise ModelValidationError(name, "must be finite")


def build_full_hamiltonian(model: GateModel, omega_mw: float, phi_mw: float) -> HamiltonianBlock:
    """
    Build H/ħ of two four-level atoms over the full 16-dimensional product space in the lab frame,
    with the microwave phase carried explicitly as e^{iφ_mw} on the |r1><r2| coupling.

    :raise ModelValidationError: When the model is in the infinite-J limit.
        Use :py:func:`project_infinite_j` on a reduced block instead.
    """
    if model.infinite_j:
        raise ModelValidationError("infinite_j", "the full space has no J -> infinity limit, project a 11 block")
    return lab_frame_block(model, omega_mw=omega_mw, phi_mw=phi_mw, sector=Sector.FULL)


def lab_frame_block(model: GateModel, omega_mw: float, phi_mw: float, sector: Sector | str) -> HamiltonianBlock:
    """Build the lab-frame four-level Hamiltonian restricted to ``sector``"""
    _check_controls(omega_mw=omega_mw, phi_mw=phi_mw)
    coefficients = static_coefficients(model) | {
        "mw_x": omega_mw * np.cos(phi_mw),
        "mw_y": omega_mw * np.sin(phi_mw),
    }
    return _sector_block(model, coefficients, sector)


def rotated_frame_block(
        model: GateModel, omega_mw: float, delta_mw: float, sector: Sector | str, laser: bool = True
) -> HamiltonianBlock:
    """
    Build the four-level Hamiltonian in the frame rotating with the microwave phase,
    where the phase appears as the detuning Δ_mw on |r2> and the coupling is real.

    :param laser: Whether the optical drive is on.
    :raise SectorError: When ``sector`` is not 01, 10 or 11.
    """
    _check_controls(omega_mw=omega_mw, delta_mw=delta_mw)
    sector = Sector.parse(sector)
    if sector == Sector.FULL:
        raise SectorError("Rotated-frame blocks are built per sector: choose one of 01, 10, 11")

    coefficients = static_coefficients(model, laser=laser) | {"mw_x": omega_mw, "mw_detuning": delta_mw}
    return _sector_block(model, coefficients, sector)


def _sector_block(model: GateModel, coefficients: Mapping[str, float], sector: Sector | str) -> HamiltonianBlock:
    sector = Sector.parse(sector)
    labels, terms = sector_terms(sector, FOUR_LEVEL_STATES)
    block = HamiltonianBlock(labels=labels, matrix=combine(terms, coefficients), sector=sector)

    if model.infinite_j and sector == Sector.S11:
        block = project_infinite_j(block)
    return block


def project_infinite_j(block: HamiltonianBlock) -> HamiltonianBlock:
    """
    Restrict a ``11`` sector block to the states that survive the J -> infinity limit,
    removing |r1 r2+> and |r2 r2>.

    :raise SectorError: When ``block`` is not a ``11`` sector block.
    """
    if block.sector != Sector.S11 or not any(label in block.labels for label in INFINITE_J_EXCLUDED):
        raise SectorError(f"Infinite-J projection needs a 11 sector block, got {block.sector.label}")

    keep = _infinite_j_keep(block.labels)
    return HamiltonianBlock(
        labels=tuple(block.labels[i] for i in keep),
        matrix=block.matrix[np.ix_(keep, keep)],
        sector=block.sector,
    )


def blockade_block(
        omega_o: float, delta: float, v: float, sector: Sector | str, phi_o: float = 0.0, gamma: float = 0.0
) -> HamiltonianBlock:
    """
    Build the single-Rydberg-level Hamiltonian
    Ω_o(cos φ_o·x + sin φ_o·y) - Δ Σ|r><r| + V|rr><rr| restricted to ``sector``.
    """
    _check_controls(omega_o=omega_o, delta=delta, v=v, phi_o=phi_o)
    sector = Sector.parse(sector)
    labels, terms = sector_terms(sector, BLOCKADE_STATES)
    coefficients = {
        "laser_x": omega_o * np.cos(phi_o),
        "laser_y": omega_o * np.sin(phi_o),
        "detuning": delta,
        "v11": v,
        "decay_1": gamma,
    }
    return HamiltonianBlock(labels=labels, matrix=combine(terms, coefficients), sector=sector)


def build_effective_vdw_blocks(
        controls: EffectiveVdwControls, omega_o: float, step: int
) -> tuple[HamiltonianBlock, HamiltonianBlock]:
    """
    Build the 01 (2×2) and 11 (3×3) blocks of the effective van der Waals model at ``step``.

    The microwave dressing enters as the shift 1/(4τ) of the singly excited level and an
    effective interaction -1/(2τ) which exactly cancels it on the doubly excited level.
    """
    if not 0 <= step < controls.n_steps:
        raise ModelValidationError("step", f"must be in [0, {controls.n_steps}), got {step}")

    delta = float(controls.delta[step])
    v = float(controls.v[step])
    return (
        blockade_block(omega_o, delta=delta, v=v, sector=Sector.S01),
        blockade_block(omega_o, delta=delta, v=v, sector=Sector.S11),
    )


###########################################################################
## Frame transformation
###########################################################################
def phase_to_detuning(pulse: Pulse) -> RealArray:
    """
    Convert the microwave phase samples into the rotated-frame detuning Δ_mw = dφ_mw/dt.

    Uses central differences between neighbouring midpoints in the interior
    and one-sided differences at both ends.
    """
    if pulse.n_steps < 2:
        raise ModelValidationError("n_steps", "at least 2 samples are needed to differentiate the phase")
    if pulse.dt <= 0:
        raise ModelValidationError("total_time", "must be > 0 to differentiate the phase")
    return np.gradient(pulse.phi_mw, pulse.dt, edge_order=1)
