"""wirebend: a fabrication-aware design compiler for CNC wire bending.

Turns 3D polyline designs and parametric connector specs into verified,
collision-checked, springback-compensated machine programs and numbered
assembly instructions.
"""

from .compiler import BendProgram, Instruction, bend, compensate, compile_path, feed, rotate, simulate
from .connectors import (
    ALUMINUM_WIRE,
    ConnectorKind,
    ConnectorSpec,
    Splice,
    WireMaterial,
    WirePart,
    check_orientation,
    estimate_capacity,
    generate,
    link,
)
from .errors import (
    ConstraintViolation,
    EndpointOccupied,
    InfeasibleSpec,
    InfeasibleTrack,
    SelfSplice,
    TargetUnreachable,
    UnknownLabel,
    Unsimplifiable,
    VersionError,
    WirebendError,
)
from .machine import (
    MachineProfile,
    SpringbackCurve,
    actual_angle,
    commanded_for,
    default_springback,
    load_profile,
    min_feed,
    save_profile,
)
from .marble import ClipPosition, TrackSet, TrackSpec, generate_track
from .paths import CollisionReport, Conflict, Polyline3, SimplifyParams, deplanarize, detect_conflicts, simplify
from .scene_io import (
    AssemblyPlan,
    AssemblyStep,
    Scene,
    export_assembly,
    export_coords_csv,
    export_program_csv,
    load_scene,
    parse_coords_csv,
    parse_program_csv,
    save_scene,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
