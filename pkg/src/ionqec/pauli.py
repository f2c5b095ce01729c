"""Signed Pauli strings over an indexed qubit register.

A PauliString is phase * prod_i sigma_i with sigma_i in {X, Y, Z} acting on
qubit i, and phase in {+1, -1, +i, -i}.  Used to represent stabilizers,
logical operators and sampled error insertions.
"""

from __future__ import annotations

from dataclasses import dataclass, field


# single-qubit products: (a, b) -> (phase, c) with a*b = phase*c
_MUL = {
    ("X", "X"): (1, "I"), ("Y", "Y"): (1, "I"), ("Z", "Z"): (1, "I"),
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}

_VALID_PHASES = (1, -1, 1j, -1j)


@dataclass(frozen=True)
class PauliString:
    phase: complex = 1
    factors: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.phase not in _VALID_PHASES:
            raise ValueError(f"phase must be a fourth root of unity, got {self.phase}")
        for q, s in self.factors.items():
            if s not in ("X", "Y", "Z"):
                raise ValueError(f"bad Pauli letter {s!r} on qubit {q}")

    @staticmethod
    def identity() -> "PauliString":
        return PauliString()

    @staticmethod
    def from_label(label: str, qubits, phase: complex = 1) -> "PauliString":
        """Build from a letter sequence, e.g. from_label('XZ', [0, 3])."""
        qubits = list(qubits)
        if len(label) != len(qubits):
            raise ValueError("label/qubit length mismatch")
        factors = {q: s for q, s in zip(qubits, label) if s != "I"}
        return PauliString(phase, factors)

    def on(self, qubit: int) -> str:
        return self.factors.get(qubit, "I")

    @property
    def weight(self) -> int:
        return len(self.factors)

    @property
    def support(self) -> frozenset:
        return frozenset(self.factors)

    def __mul__(self, other: "PauliString") -> "PauliString":
        phase = self.phase * other.phase
        factors = dict(self.factors)
        for q, s in other.factors.items():
            a = factors.get(q)
            if a is None:
                factors[q] = s
            else:
                ph, c = _MUL[(a, s)]
                phase *= ph
                if c == "I":
                    del factors[q]
                else:
                    factors[q] = c
        return PauliString(phase, factors)

    def commutes(self, other: "PauliString") -> bool:
        anti = 0
        for q, s in self.factors.items():
            o = other.factors.get(q)
            if o is not None and o != s:
                anti ^= 1
        return anti == 0

    def with_phase(self, phase: complex) -> "PauliString":
        return PauliString(phase, dict(self.factors))

    def unsigned(self) -> "PauliString":
        return PauliString(1, dict(self.factors))

    def restrict(self, qubits) -> "PauliString":
        """Keep only factors on the given qubits (phase kept as-is)."""
        keep = set(qubits)
        return PauliString(self.phase, {q: s for q, s in self.factors.items() if q in keep})

    def key(self):
        """Hashable phase-free representation (sorted support)."""
        return tuple(sorted(self.factors.items()))

    def __repr__(self):
        ph = {1: "+", -1: "-", 1j: "+i", -1j: "-i"}[self.phase]
        if not self.factors:
            return f"{ph}I"
        body = " ".join(f"{s}{q}" for q, s in sorted(self.factors.items()))
        return f"{ph}{body}"
