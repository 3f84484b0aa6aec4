"""Geometric consistency between the physical home/robot and their digital models."""

from typing import Any, Dict, Mapping, Sequence
import logging
import math

import numpy as np
import pandas as pd

from src.errors import NonFiniteInput, SceneError
from .scene import Scene

logger = logging.getLogger(__name__)


def geometric_error_2d(physical_xy: Sequence[float], digital_xy: Sequence[float]) -> float:
    """
    Euclidean distance between two map-plane coordinates.

    Args:
        physical_xy: (x, y) measured in the physical space, cm
        digital_xy: (x, y) of the digital model, cm

    Returns:
        Distance in cm

    Raises:
        NonFiniteInput: If a coordinate is NaN or infinite
    """
    p = np.asarray(physical_xy, dtype=float)
    d = np.asarray(digital_xy, dtype=float)
    if p.shape != (2,) or d.shape != (2,):
        raise SceneError(f"expected 2D coordinates, got shapes {p.shape} and {d.shape}")
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(d))):
        raise NonFiniteInput("coordinates must be finite")
    return float(math.hypot(p[0] - d[0], p[1] - d[1]))


def consistency_report(physical: Scene, digital: Scene) -> pd.DataFrame:
    """
    Per-object positional error between a physical and a digital scene.

    Objects are matched by id; ids present in only one scene are skipped
    with a warning.

    Returns:
        DataFrame with columns object, physical_x, physical_y, digital_x,
        digital_y, error_cm. ``attrs`` carries mean_error_cm and
        max_error_cm.
    """
    rows = []
    for object_id, obj in physical.objects.items():
        if object_id not in digital:
            logger.warning(f"Object '{object_id}' missing from digital scene")
            continue
        twin = digital.get(object_id)
        rows.append(
            {
                "object": object_id,
                "physical_x": obj.pose_2d[0],
                "physical_y": obj.pose_2d[1],
                "digital_x": twin.pose_2d[0],
                "digital_y": twin.pose_2d[1],
                "error_cm": geometric_error_2d(obj.pose_2d, twin.pose_2d),
            }
        )
    extra = [object_id for object_id in digital.objects if object_id not in physical]
    if extra:
        logger.warning(f"Objects only in digital scene: {', '.join(extra)}")

    df = pd.DataFrame(rows, columns=["object", "physical_x", "physical_y", "digital_x", "digital_y", "error_cm"])
    df.attrs["mean_error_cm"] = float(df["error_cm"].mean()) if len(df) else 0.0
    df.attrs["max_error_cm"] = float(df["error_cm"].max()) if len(df) else 0.0
    logger.info(f"Compared {len(df)} objects, mean error {df.attrs['mean_error_cm']:.3f} cm")
    return df


def report_to_dict(report: pd.DataFrame) -> Dict[str, Any]:
    return {
        "objects": report.to_dict(orient="records"),
        "mean_error_cm": report.attrs.get("mean_error_cm", 0.0),
        "max_error_cm": report.attrs.get("max_error_cm", 0.0),
    }


def dimension_errors(physical: Mapping[str, float], digital: Mapping[str, float]) -> Dict[str, Any]:
    """
    Absolute per-dimension error between measured and modeled robot dimensions.

    The ``components`` entry is a count; the model is complete when both
    counts agree.

    Args:
        physical: Dimension name -> measured value (cm)
        digital: Dimension name -> modeled value (cm)

    Returns:
        Dict with ``errors`` (name -> |digital - physical|), ``max_error``
        and ``complete``
    """
    shared = [k for k in physical if k in digital and k != "components"]
    missing = sorted(set(physical) ^ set(digital))
    if missing:
        logger.warning(f"Dimensions present on one side only: {', '.join(missing)}")

    errors = {}
    for name in shared:
        a, b = float(physical[name]), float(digital[name])
        if not (math.isfinite(a) and math.isfinite(b)):
            raise NonFiniteInput("dimensions must be finite", subject=name)
        errors[name] = abs(b - a)

    return {
        "errors": errors,
        "max_error": max(errors.values()) if errors else 0.0,
        "complete": physical.get("components") == digital.get("components"),
    }
