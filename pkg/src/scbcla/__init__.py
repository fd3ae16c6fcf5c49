"""Gate-level carry lookahead adder generation and power/delay/area evaluation.

Conventional (CCLA) and section-carry based (SCBCLA) carry lookahead adders
are generated as standard-cell netlists, verified by simulation and scored
by the figure of merit ``10^6 / (power * delay * area)``.
"""

from .celllib import CellKind, CellLibrary, builtin_unit_library, load_library
from .genarch import AdderSpec, Arch, SegmentSpec, Style, build_adder, named_specs, parse_spec
from .netlist import Netlist, validate
from .timing import analyze

__version__ = "0.1.0"

__all__ = [
    "CellKind",
    "CellLibrary",
    "builtin_unit_library",
    "load_library",
    "AdderSpec",
    "Arch",
    "SegmentSpec",
    "Style",
    "build_adder",
    "named_specs",
    "parse_spec",
    "Netlist",
    "validate",
    "analyze",
]
