from __future__ import annotations

import numpy as np
import pytest

from wirebend.machine import MachineProfile, default_springback, save_profile
from wirebend.paths import Polyline3


@pytest.fixture
def profile() -> MachineProfile:
    """Bench profile: 20/10 mm head, 1.6 mm aluminium, 2 mm gap."""
    return MachineProfile(
        die_diameter_mm=20.0,
        pin_diameter_mm=10.0,
        wire_diameter_mm=1.6,
        clearance_gap_mm=2.0,
        max_bend_deg=135.0,
        min_plastic_deg=15.0,
        springback=default_springback(),
    )


@pytest.fixture
def profile_file(tmp_path, profile):
    path = tmp_path / "machine.json"
    save_profile(profile, path)
    return path


@pytest.fixture
def staircase() -> Polyline3:
    """Planar path with three consecutive same-direction 90-degree bends."""
    return Polyline3.from_list(
        [[0, 0, 0], [10, 0, 0], [10, 10, 0], [0, 10, 0], [0, 5, 0]]
    )


@pytest.fixture
def tight_square() -> Polyline3:
    """Same three-bend shape with 2 mm feeds, closing on its start point."""
    return Polyline3.from_list([[0, 0, 0], [2, 0, 0], [2, 2, 0], [0, 2, 0], [0, 0, 0]])


def noisy_sweep(n_points: int = 200, seed: int = 11) -> Polyline3:
    """Jittered arc sweep used by simplification tests."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, n_points)
    base = np.stack(
        [
            600.0 * t,
            40.0 * np.sin(2.5 * np.pi * t),
            25.0 * np.cos(1.5 * np.pi * t),
        ],
        axis=1,
    )
    return Polyline3(base + rng.uniform(-0.8, 0.8, size=base.shape))


def walkthrough_scene(profile):
    """Pegboard pin + handle clamp placed apart, then linked.

    The link spans 60 mm, so a third part (the bridge wire) is
    synthesized: 3 parts, 1 splice.
    """
    from wirebend.connectors import ConnectorKind, ConnectorSpec, Splice, generate, link
    from wirebend.scene_io import Scene

    scene = Scene(profile_ref="bench")
    pin = generate(ConnectorSpec(ConnectorKind.PEGBOARD_PIN, {}), profile)
    clamp = generate(ConnectorSpec(ConnectorKind.CLAMP, {"jaw_gap_mm": 14.0}), profile)
    scene.add_part(pin)
    scene.add_part(clamp.path.transformed(translation=[35.0, 0.0, 0.0]))
    link(scene, Splice(part_a=1, end_a="start", part_b=2, end_b="start", sleeve_length_mm=10.0))
    return scene
