"""
Generators of two atoms coupled to one motional mode each along the interatomic axis.

The space is ordered internal ⊗ motion_A ⊗ motion_B, so the index of |s, n_A, n_B> is
``s·M² + n_A·M + n_B`` for a Fock cutoff M. Each drive carries the photon recoil
e^{iη(a + a†)} of its atom, J and V_ij follow the distance fluctuation δR/R = (x_osc/R)(x_A - x_B),
and decay enters as -iΓ/2 on every decaying level.
"""
from dataclasses import dataclass
from functools import cache
from typing import Any

import numpy as np
import scipy.linalg

from forge.noise.exception import NoiseModelError
from forge.noise.model import NoiseModel
from forge.printer import PrettyPrinter
from forge.protocols.twophoton import TwoPhotonModel, PROBE_WAVELENGTH, COUPLING_WAVELENGTH
from forge.statespace import GateModel, HamiltonianBlock, Sector, FOUR_LEVEL_STATES, TWO_PHOTON_STATES
from forge.statespace.basis import transition, projector
from forge.types import ComplexArray, RealArray

type AtomModel = GateModel | TwoPhotonModel


###########################################################################
## Oscillator
###########################################################################
def annihilation(cutoff: int) -> RealArray:
    """The ladder operator a truncated to ``cutoff`` Fock states"""
    return np.diag(np.sqrt(np.arange(1, cutoff)), k=1)


def position(cutoff: int) -> RealArray:
    """The dimensionless position a + a†"""
    a = annihilation(cutoff)
    return a + a.T


def kinetic(cutoff: int) -> RealArray:
    """The free kinetic term -(a† - a)²/4, equal to P²/2m in units of ħω_trap"""
    a = annihilation(cutoff)
    momentum = a.T - a
    return -(momentum @ momentum) / 4


def displacement_operator(eta: float, cutoff: int) -> ComplexArray:
    """The recoil kick e^{iη(a + a†)} on ``cutoff`` Fock states"""
    return scipy.linalg.expm(1j * eta * position(cutoff))


def displacement_unitarity_error(eta: float, cutoff: int, padding: int | None = None) -> float:
    """
    How far the first ``cutoff`` Fock states of an untruncated recoil kick are from unitary.

    The kick is built on ``cutoff + padding`` states and restricted back to ``cutoff``.
    The result is the spectral norm of D†D - 1 on the restricted block,
    i.e. the population a kick pushes beyond the cutoff.
    """
    padding = cutoff if padding is None else padding
    block = displacement_operator(eta, cutoff + padding)[:cutoff, :cutoff]
    return float(np.linalg.norm(block.conj().T @ block - np.eye(cutoff), ord=2))


###########################################################################
## Internal sectors
###########################################################################
@cache
def internal_pairs(sector: Sector, states: tuple[str, ...]) -> tuple[tuple[str, str], ...]:
    """
    The internal product states |a b> reachable from the computational state of ``sector``.

    The motional modes distinguish the atoms, so the ``11`` sector keeps both orderings.
    """
    ground, excited = states[0], states[1:]
    match sector:
        case Sector.S01:
            return tuple((ground, s) for s in excited)
        case Sector.S10:
            return tuple((s, ground) for s in excited)
        case Sector.S11:
            return tuple((a, b) for a in excited for b in excited)
        case _:
            return tuple((a, b) for a in states for b in states)


def _restrict(
        op_a: ComplexArray | None,
        op_b: ComplexArray | None,
        states: tuple[str, ...],
        pairs: tuple[tuple[str, str], ...],
) -> ComplexArray:
    """The internal operator op_A ⊗ op_B restricted to ``pairs``"""
    identity = np.eye(len(states))
    full = np.kron(identity if op_a is None else op_a, identity if op_b is None else op_b)
    index = [len(states) * states.index(a) + states.index(b) for a, b in pairs]
    return full[np.ix_(index, index)]


###########################################################################
## Generator
###########################################################################
@dataclass(frozen=True, eq=False)
class NoisyGenerator(PrettyPrinter):
    """
    A sector of the motional generator split into its static part and the two microwave quadratures.

    :param internal: The internal product states of the sector in order.
    :param fock_cutoff: Motional states per atom M.
    :param static: Everything independent of the microwave controls.
    :param mw_x: Generator of Ω_mw·cos φ_mw.
    :param mw_y: Generator of Ω_mw·sin φ_mw.
    """
    sector: Sector
    internal: tuple[tuple[str, str], ...]
    fock_cutoff: int
    static: ComplexArray
    mw_x: ComplexArray
    mw_y: ComplexArray

    @property
    def dim(self) -> int:
        return len(self.internal) * self.fock_cutoff ** 2

    @property
    def labels(self) -> tuple[str, ...]:
        """Labels ``<internal>|<n_A>,<n_B>`` in index order"""
        cutoff = range(self.fock_cutoff)
        return tuple(f"{a}{b}|{n_a},{n_b}" for a, b in self.internal for n_a in cutoff for n_b in cutoff)

    def at(self, omega_mw: float, phi_mw: float) -> ComplexArray:
        """The generator at the given microwave amplitude and phase"""
        return self.static + omega_mw * np.cos(phi_mw) * self.mw_x + omega_mw * np.sin(phi_mw) * self.mw_y

    def internal_rows(self, label: str) -> slice:
        """Rows of all motional states paired with the internal state ``label``"""
        index = [a + b for a, b in self.internal].index(label)
        size = self.fock_cutoff ** 2
        return slice(index * size, (index + 1) * size)

    def basis_state(self, label: str, n_a: int, n_b: int) -> int:
        """Index of |label, n_A, n_B>"""
        return self.internal_rows(label).start + n_a * self.fock_cutoff + n_b

    def as_dict(self) -> dict[str, Any]:
        return {"sector": self.sector, "dim": self.dim, "fock_cutoff": self.fock_cutoff}


class _Builder:
    """Assembles the internal ⊗ motion operators of one sector"""

    def __init__(self, states: tuple[str, ...], sector: Sector, cutoff: int):
        self.states = states
        self.pairs = internal_pairs(sector, states)
        self.cutoff = cutoff
        self.identity = np.eye(cutoff)
        self.dim = len(self.pairs) * cutoff ** 2

    def motion_a(self, op: ComplexArray) -> ComplexArray:
        return np.kron(op, self.identity)

    def motion_b(self, op: ComplexArray) -> ComplexArray:
        return np.kron(self.identity, op)

    def internal(self, op_a: ComplexArray | None, op_b: ComplexArray | None) -> ComplexArray:
        return _restrict(op_a, op_b, self.states, self.pairs)

    def on_internal(self, op_a: ComplexArray | None, op_b: ComplexArray | None) -> ComplexArray:
        """An internal operator acting trivially on motion"""
        return np.kron(self.internal(op_a, op_b), np.eye(self.cutoff ** 2))

    def single(self, op: ComplexArray) -> ComplexArray:
        """A single-atom internal operator on both atoms without motion"""
        return self.on_internal(op, None) + self.on_internal(None, op)

    def drive(self, lower: str, upper: str, kick: ComplexArray) -> ComplexArray:
        """
        The x and y quadratures of a recoiling drive on both atoms, stacked.

        A drive Ω/2 Σ_atoms (e^{iφ}|lower><upper| ⊗ kick + h.c.) equals Ω (cos φ·x + sin φ·y).
        """
        down = transition(self.states, lower, upper)
        lowering = (
                np.kron(self.internal(down, None), self.motion_a(kick))
                + np.kron(self.internal(None, down), self.motion_b(kick))
        )
        raising = lowering.conj().T
        return np.stack([(lowering + raising) / 2, 1j * (lowering - raising) / 2])

    def pair(self, a: str, b: str) -> ComplexArray:
        return self.internal(transition(self.states, a, a), transition(self.states, b, b))

    def exchange(self) -> ComplexArray:
        up = self.internal(transition(self.states, "r1", "r2"), transition(self.states, "r2", "r1"))
        return up + up.conj().T


def noisy_generator(
        model: AtomModel, noise: NoiseModel, sector: Sector | str | None = None, delta_o: float | None = None
) -> NoisyGenerator:
    """
    Build the generator H_motion + H_atom + H_int + H_decay of ``sector`` in units of Ω_o.

    Four-level models drive |1> <-> |r1> with the optical recoil. Two-photon models drive
    |1> <-> |e> and |e> <-> |r1> with counter-propagating beams whose recoils partly cancel,
    and ``noise.omega_o`` is then the effective two-photon Rabi frequency.
    Decay rates come from ``noise``, the rates on the gate model are not used.

    :param delta_o: The optical detuning, defaulting to the model's.
    """
    sector = Sector.FULL if sector is None else Sector.parse(sector)
    two_photon = isinstance(model, TwoPhotonModel)
    gate = model.gate if two_photon else model
    if gate.infinite_j:
        raise NoiseModelError("infinite_j", "motional simulations need a finite exchange strength J")
    delta_o = gate.delta_o if delta_o is None else delta_o

    states = TWO_PHOTON_STATES if two_photon else FOUR_LEVEL_STATES
    build = _Builder(states, sector, noise.fock_cutoff)
    cutoff = noise.fock_cutoff

    def kick(wavelength: float, sign: float = 1.0) -> ComplexArray:
        eta = sign * noise.lamb_dicke(wavelength) if noise.recoil else 0.0
        return displacement_operator(eta, cutoff)

    kinetic_term = build.motion_a(kinetic(cutoff)) + build.motion_b(kinetic(cutoff))
    static = noise.trap_ratio * np.kron(np.eye(len(build.pairs)), kinetic_term).astype(complex)

    if two_photon:
        static += model.omega_1 * build.drive("1", "e", kick(PROBE_WAVELENGTH))[0]
        static += model.omega_2 * build.drive("e", "r1", kick(COUPLING_WAVELENGTH, sign=-1.0))[0]
        static += -model.signed_delta_e(delta_o) * build.single(projector(states, "e"))
    else:
        static += gate.omega_o * build.drive("1", "r1", kick(noise.lambda_o))[0]
    static += -delta_o * build.single(projector(states, "r1", "r2"))

    scale = noise.fluctuation_scale if noise.fluctuations else 0.0
    separation = build.motion_a(position(cutoff)) - build.motion_b(position(cutoff))
    motion_identity = np.eye(cutoff ** 2)

    def modulated(internal: ComplexArray, strength: float, order: int) -> ComplexArray:
        return strength * np.kron(internal, motion_identity - order * scale * separation)

    static += modulated(build.exchange(), gate.j_exchange, order=3)
    static += modulated(build.pair("r1", "r1"), gate.v11, order=6)
    static += modulated(build.pair("r1", "r2") + build.pair("r2", "r1"), gate.v12, order=6)
    static += modulated(build.pair("r2", "r2"), gate.v22, order=6)

    if noise.decay:
        gamma_e = model.gamma_e if two_photon else 0.0
        if noise.gamma_e is not None:
            gamma_e = noise.rate(noise.gamma_e)
        rates = {"r1": noise.rate(noise.gamma_1), "r2": noise.rate(noise.gamma_2), "e": gamma_e}
        for level, rate in rates.items():
            if rate and level in states:
                static += -0.5j * rate * build.single(projector(states, level))

    mw_x, mw_y = build.drive("r1", "r2", kick(noise.lambda_mw))
    return NoisyGenerator(
        sector=sector,
        internal=build.pairs,
        fock_cutoff=cutoff,
        static=static,
        mw_x=mw_x,
        mw_y=mw_y,
    )


def build_noisy_generator(
        controls: dict[str, float],
        model: AtomModel,
        noise: NoiseModel,
        sector: Sector | str | None = None,
        delta_o: float | None = None,
) -> HamiltonianBlock:
    """
    Build the noisy generator at fixed microwave ``controls`` (``omega_mw`` and ``phi_mw``).

    The default space is the full 16·M² product of two four-level atoms and their motion.
    A ``sector`` restricts the internal states to those reachable from 01, 10 or 11 (3M² or 9M²).

    :raise NoiseModelError: When a control is missing.
    """
    missing = [name for name in ("omega_mw", "phi_mw") if name not in controls]
    if missing:
        raise NoiseModelError("controls", f"missing {", ".join(missing)}")

    generator = noisy_generator(model, noise, sector=sector, delta_o=delta_o)
    return HamiltonianBlock(
        labels=generator.labels,
        matrix=generator.at(controls["omega_mw"], controls["phi_mw"]),
        sector=generator.sector,
    )


def free_motion(noise: NoiseModel) -> ComplexArray:
    """The motional generator of two untrapped atoms in units of Ω_o"""
    identity = np.eye(noise.fock_cutoff)
    single = kinetic(noise.fock_cutoff)
    return noise.trap_ratio * (np.kron(single, identity) + np.kron(identity, single))
