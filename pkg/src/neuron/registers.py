"""
Registros de desplazamiento del bloque de control (Registro 1 de patrón, Registro 2 de conmutación).
"""
from dataclasses import dataclass
from typing import Dict, Tuple


@dataclass(frozen=True)
class ShiftRegister:
    """
    Vector de bits de ancho fijo; bits[0] es el MSB.

    Con wrap=True el MSB realimenta al LSB (desplazamiento circular); con
    wrap=False entra un 0 por el LSB.
    """

    bits: Tuple[int, ...]
    wrap: bool = True

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise ValueError("El registro necesita al menos un bit")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"Bits no binarios: {self.bits}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str, wrap: bool = True) -> "ShiftRegister":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"Contenido de registro no válido: '{text}'")
        return cls(tuple(int(c) for c in text), wrap)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    @property
    def width(self) -> int:
        return len(self.bits)

    @property
    def msb(self) -> int:
        return self.bits[0]

    @property
    def lsb(self) -> int:
        return self.bits[-1]

    @property
    def popcount(self) -> int:
        return sum(self.bits)

    def shifted(self) -> "ShiftRegister":
        """Desplaza hacia el MSB."""
        fill = self.bits[0] if self.wrap else 0
        return ShiftRegister(self.bits[1:] + (fill,), self.wrap)


# Registro 2 "01": MSB = 0 cierra S1 (integración activa), el LSB gobierna S2
TOGGLE_INIT = ShiftRegister((0, 1), wrap=True)

_PATTERNS: Dict[str, ShiftRegister] = {
    "RS": ShiftRegister((1, 1, 1, 1), wrap=True),
    "CH": ShiftRegister((1, 1, 1, 0), wrap=True),
    "IB": ShiftRegister((1, 1, 1, 0), wrap=False),
}


def pattern_registers(name: str) -> ShiftRegister:
    """Programa del Registro 1 para RS / CH / IB."""
    key = name.upper().replace("PATTERN:", "")
    if key not in _PATTERNS:
        raise ValueError(f"Patrón desconocido: {name} (disponibles: {', '.join(_PATTERNS)})")
    return _PATTERNS[key]
