"""Built-in robot and environment reference data."""

import math

HALF_PI = math.pi / 2

# TIAGo arm D-H rows: (alpha, a, d, theta_lower, theta_upper).
# a and d are meters.
TIAGO_ARM_DH_ROWS = [
    (0.0, 0.15505, -0.151, 0.0, 2.75),
    (HALF_PI, 0.125, -0.0165, -1.57, 1.09),
    (-HALF_PI, 0.0, -0.0895, -3.53, 1.57),
    (HALF_PI, 0.02, -0.027, -0.39, 2.36),
    (-HALF_PI, 0.02, 0.162, -2.09, 2.09),
    (HALF_PI, 0.0, 0.0, -1.41, 1.41),
    (-HALF_PI, 0.0, 0.0, -2.09, 2.09),
]

TIAGO_ARM_CHAIN_NAME = "tiago_arm_7dof"

# Measured robot dimensions (cm, except the component count)
TIAGO_PHYSICAL_DIMENSIONS = {
    "components": 89,
    "height": 110.0,
    "chassis_height": 30.0,
    "chassis_diameter": 54.0,
    "tray_height": 60.0,
    "tray_width": 28.0,
    "tray_length": 33.0,
}

TIAGO_DIGITAL_DIMENSIONS = {
    "components": 89,
    "height": 110.0998,
    "chassis_height": 30.0384,
    "chassis_diameter": 53.172,
    "tray_height": 60.4548,
    "tray_width": 28.476,
    "tray_length": 33.264,
}

# Household object vertices on the map plane (cm, origin at the upper left corner)
LAB_HOME_PHYSICAL_XY = {
    "fridge": (107.0, 348.0),
    "table1": (412.0, 157.0),
    "table2": (334.0, 347.0),
    "desk": (493.0, 213.0),
    "microwave": (405.0, 163.0),
    "television": (427.0, 152.0),
}

LAB_HOME_DIGITAL_XY = {
    "fridge": (105.423, 348.525),
    "table1": (414.205, 156.423),
    "table2": (333.012, 345.423),
    "desk": (491.432, 212.433),
    "microwave": (406.429, 162.956),
    "television": (425.912, 153.422),
}
