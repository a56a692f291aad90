#!/usr/bin/env python3
"""Regenerate the default generative spec shipped at
src/gazeintent/data/default_spec.json.

The table below is the package's source of truth for the default
class-conditional densities (9 fitted features; everything else falls back
to a shared unit uniform so it carries no class evidence). Rows are
(family, p1, p2, ks_p) pairs per condition, select class first.
"""

import json
from pathlib import Path

U = ("none_uniform", 0.0, 1.0, None)  # shared no-evidence fallback

# condition order: (simple|complex, large|small, dense|wide)
CONDS = [
    "simple-large-dense", "simple-large-wide", "simple-small-dense", "simple-small-wide",
    "complex-large-dense", "complex-large-wide", "complex-small-dense", "complex-small-wide",
]

FITTED = {
    "fix1_velocity": [
        (("weibull", 1.397, 0.014, 0.413), ("gamma", 2.311, 0.006, 0.423)),
        (("weibull", 2.22, 0.034, 0.966), ("weibull", 1.844, 0.03, 0.61)),
        (("weibull", 1.492, 0.015, 0.844), ("log_normal", -4.527, 0.753, 0.125)),
        (("normal", 0.032, 2.096e-4, 0.858), ("weibull", 1.727, 0.029, 0.887)),
        (("gamma", 2.661, 0.004, 0.697), ("normal", 0.013, 4.576e-5, None)),
        (("weibull", 2.191, 0.02, 0.965), ("normal", 0.022, 1.024e-4, None)),
        (("gamma", 2.825, 0.004, 0.376), ("normal", 0.013, 4.617e-5, None)),
        (("weibull", 1.838, 0.022, 0.819), ("normal", 0.023, 1.092e-4, None)),
    ],
    "fix1_std_x_deg": [
        (("gompertz", 0.958, 2.647, 0.545), ("weibull", 1.441, 0.324, 0.188)),
        (("weibull", 1.675, 0.482, 0.685), ("weibull", 1.508, 0.436, 0.409)),
        (("gompertz", 1.054, 2.464, 0.343), ("weibull", 1.522, 0.308, 0.409)),
        (("gompertz", 0.49, 2.094, 0.658), ("gompertz", 0.658, 2.221, 0.285)),
        (("weibull", 1.432, 0.3, 0.778), ("normal", 0.294, 0.035, None)),
        (("weibull", 1.543, 0.426, 0.738), ("normal", 0.411, 0.055, None)),
        (("weibull", 1.487, 0.308, 0.708), ("normal", 0.3, 0.035, None)),
        (("weibull", 1.396, 0.422, 0.588), ("normal", 0.421, 0.054, None)),
    ],
    "fix1_std_y_deg": [
        (("normal", 0.194, 0.016, 0.07), ("weibull", 1.547, 0.271, 0.464)),
        (("weibull", 1.656, 0.345, 0.889), ("gompertz", 0.628, 2.822, 0.368)),
        (("gompertz", 0.96, 2.822, 0.839), ("weibull", 1.529, 0.26, 0.659)),
        (("gompertz", 0.623, 2.497, 0.912), ("gompertz", 0.551, 2.903, 0.355)),
        (("weibull", 1.45, 0.232, 0.578), ("normal", 0.229, 0.022, None)),
        (("weibull", 1.625, 0.298, 0.56), ("normal", 0.295, 0.031, None)),
        (("weibull", 1.5, 0.243, 0.455), ("normal", 0.244, 0.024, None)),
        (("weibull", 1.302, 0.261, 0.839), ("normal", 0.286, 0.03, None)),
    ],
    "fix2_velocity": [
        (("log_normal", -4.636, 0.711, 0.466), ("normal", 0.019, 1.491e-4, 0.141)),
        (("gamma", 3.652, 0.007, 0.722), ("weibull", 1.933, 0.033, 0.453)),
        (("log_normal", -4.472, 0.576, 0.128), ("logistic", 0.019, 0.008, 0.089)),
        (("weibull", 2.304, 0.026, 0.827), ("weibull", 1.938, 0.033, 0.125)),
        (("gamma", 3.182, 0.004, 0.814), ("normal", 0.011, 5.443e-5, None)),
        (("gamma", 4.07, 0.004, 0.809), ("normal", 0.021, 1.267e-4, None)),
        (("log_normal", -4.622, 0.541, 0.415), ("normal", 0.011, 5.546e-5, None)),
        (("gamma", 3.999, 0.004, 0.41), ("normal", 0.022, 1.350e-4, None)),
    ],
    "fix2_duration_ms": [
        (U, U),
        (U, U),
        (U, U),
        (U, U),
        (("gamma", 1.541, 164.248, 0.271), ("normal", 184.752, 8117.234, None)),
        (("weibull", 1.131, 214.845, 0.266), ("normal", 147.648, 7237.248, None)),
        (("weibull", 1.373, 352.295, 0.57), ("normal", 207.833, 11236.47, None)),
        (("gamma", 1.342, 182.328, 0.124), ("normal", 152.983, 8792.361, None)),
    ],
    "fix2_std_y_deg": [
        (("gamma", 2.116, 0.115, 0.78), ("weibull", 1.178, 0.218, 0.032)),
        (("weibull", 1.668, 0.455, 0.374), ("gompertz", 0.703, 2.703, 0.391)),
        (("gamma", 2.467, 0.125, 0.782), ("weibull", 1.103, 0.199, 0.035)),
        (("weibull", 1.606, 0.483, 0.932), ("gompertz", 0.608, 2.775, 0.734)),
        (("gamma", 2.049, 0.128, 0.587), ("normal", 0.227, 0.021, None)),
        (("weibull", 1.605, 0.333, 0.888), ("normal", 0.294, 0.031, None)),
        (("gamma", 2.046, 0.144, 0.658), ("normal", 0.242, 0.024, None)),
        (("weibull", 1.715, 0.357, 0.949), ("normal", 0.285, 0.03, None)),
    ],
    "sac_amplitude_head_deg": [
        (("log_normal", -2.692, 1.169, 0.297), ("log_normal", -2.319, 1.371, 0.044)),
        (("beta_prime", 1.186, 3.018, 0.091), ("weibull", 0.883, 0.611, 0.032)),
        (("log_normal", -2.145, 1.206, 0.547), ("log_normal", -2.085, 1.32, 0.066)),
        (("log_normal", -1.428, 1.12, 0.392), ("weibull", 0.852, 0.658, 0.02)),
        (("log_normal", -2.752, 1.111, 0.641), ("normal", 0.164, 0.024, None)),
        (("log_normal", -1.814, 1.054, 0.485), ("normal", 0.557, 0.231, None)),
        (("log_normal", -2.726, 1.007, 0.426), ("normal", 0.157, 0.022, None)),
        (("gamma", 1.289, 0.161, 0.994), ("normal", 0.509, 0.194, None)),
    ],
    "sac_velocity_head": [
        (U, U),
        (("gamma", 1.247, 0.02, 0.481), ("gompertz", 2.672, 9.941, 0.026)),
        (("exponential", 94.545, None, 0.51), ("weibull", 0.926, 0.013, 0.035)),
        (("gamma", 1.421, 0.014, 0.411), ("gompertz", 2.471, 9.77, 0.003)),
        (("log_normal", -5.792, 1.104, 0.406), ("normal", 0.008, 5.006e-5, None)),
        (("log_normal", -4.956, 0.933, 0.541), ("normal", 0.024, 2.715e-4, None)),
        (("log_normal", -5.737, 0.983, 0.557), ("normal", 0.008, 5.16e-5, None)),
        (("weibull", 1.287, 0.012, 0.941), ("normal", 0.024, 2.649e-4, None)),
    ],
    "coefficient_k": [
        (("logistic", 0.221, 0.657, 0.325), ("logistic", 0.571, 0.619, 0.185)),
        (("gumbel", 0.66, 0.895, 0.166), ("cauchy", 0.625, 0.57, 0.004)),
        (("logistic", 0.322, 0.637, 0.123), ("logistic", 0.627, 0.645, 0.171)),
        (("logistic", 0.992, 0.448, 0.012), ("cauchy", 0.6, 0.621, 0.006)),
        (("logistic", 0.444, 0.73, 0.99), ("normal", 0.37, 1.388, None)),
        (("logistic", 0.57, 0.725, 0.689), ("normal", 0.518, 1.433, None)),
        (("logistic", 0.193, 0.581, 0.986), ("normal", 0.383, 1.292, None)),
        (("logistic", 0.484, 0.653, 0.441), ("normal", 0.569, 1.397, None)),
    ],
}

ALL_FEATURES = [
    "fix1_duration_ms", "fix1_std_x_deg", "fix1_std_y_deg", "fix1_velocity",
    "fix2_duration_ms", "fix2_std_x_deg", "fix2_std_y_deg", "fix2_velocity",
    "sac_duration_ms", "sac_amplitude_eye_deg", "sac_amplitude_head_deg",
    "sac_amplitude_gaze_deg", "sac_velocity_eye", "sac_velocity_head",
    "sac_velocity_gaze", "coefficient_k",
]

POSITIVE = {"gamma", "weibull", "log_normal", "gompertz", "beta_prime",
            "exponential", "inverse_gamma", "log_logistic", "frechet",
            "chi_squared", "f"}


def dist_dict(family, p1, p2, ks_p):
    if family == "none_uniform":
        support = [p1, p2]
    elif family in POSITIVE:
        support = [0.0, None]
    else:
        support = [None, None]
    return {"family": family, "p1": p1, "p2": p2, "support": support, "ks_p": ks_p}


def main():
    conditions = {}
    for ci, ckey in enumerate(CONDS):
        feats = {}
        for feature in ALL_FEATURES:
            if feature in FITTED:
                t, f = FITTED[feature][ci]
            else:
                t, f = U, U
            feats[feature] = {"true": dist_dict(*t), "false": dist_dict(*f)}
        conditions[ckey] = feats
    doc = {
        "schema_version": 1,
        "kind": "gazeintent-genspec",
        "ledger_version": "v1",
        "units": {
            "durations": "ms", "amplitudes": "deg", "spreads": "deg",
            "velocities": "deg/ms", "coefficient_k": "dimensionless",
        },
        "coeffk_norm": {"mu_d": 250.0, "sigma_d": 100.0, "mu_a": 5.0, "sigma_a": 3.0},
        "class_ratio": [1, 3],
        "conditions": conditions,
    }
    out = Path(__file__).resolve().parents[1] / "src" / "gazeintent" / "data" / "default_spec.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
