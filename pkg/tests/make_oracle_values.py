"""Regenerate the frozen reference numbers used in the test suite.

    python tests/make_oracle_values.py

Uses only tests/oracle.py and the raw published table (pulses read in reverse
printed order, amplitudes in pi/T, phases in pi).
"""

import numpy as np

from oracle import fidelity, mp_propagator, populations, sequence_propagator

PI = np.pi
TABLE = {
    "P1": ((0, 0.5350, 1.9143, 1.9720, 0.2462, 1.3857), (0.1586, 0.6205, 0.4461, 0.4994, 1.0982, 0.8116)),
    "P1half": ((0, 0.5003, 1.1833, 1.1037, 1.5215, 0.6296, 0.4988),
               (0.2997, 0.4086, 0.4242, 0.6462, 0.6771, 0.7331, 0.8712)),
    "X": ((0, 1.1391, 1.5009, 1.7673, 1.0754, 1.5435, 1.0983, 0.0282),
          (0.4318, 0.6684, 0.6746, 0.6175, 1.3619, 0.8914, 1.4236, 0.8910)),
    "H": ((0, 0.6513, 0.1231, 0.5530, 0.8964, 0.0692, 0.4831),
          (0.8289, 0.9549, 1.1362, 1.2669, 0.8429, 1.4784, 1.0455)),
    "T": ((0, 0.9232, 1.5599, 1.9209, 0.2637, 1.1305, 0.9090),
          (0.2647, 0.1738, 0.6147, 0.8168, 0.1897, 0.6416, 0.7425)),
}
GATES = {
    "X": np.array([[0, 1], [1, 0]]),
    "H": np.array([[1, 1], [1, -1]]) / np.sqrt(2),
    "T": np.diag([1, np.exp(1j * PI / 4)]),
}


def catalog_U(name, eps, delta=0.5):
    phases, rabis = TABLE[name]
    return sequence_propagator(np.array(rabis[::-1]) * PI, np.array(phases[::-1]) * PI, eps, delta)


def main():
    out = {}
    grid21 = np.linspace(-0.1, 0.1, 21)
    U = sequence_propagator([PI], [0.0], 0.0, 20.0)
    out["PI_D20_P"] = tuple(populations(U))
    out["PI_D05_P"] = tuple(populations(sequence_propagator([PI], [0.0], 0.0, 0.5)))
    out["P1_P"] = tuple(populations(catalog_U("P1", 0.0)))
    p = populations(catalog_U("P1half", 0.0))
    out["P1HALF_COST"] = abs(0.5 - p[0]) + abs(0.5 - p[1])
    for g in "XHT":
        out[f"F_{g}"] = fidelity(catalog_U(g, 0.0), GATES[g])
    out["X_WORST_F"] = min(fidelity(catalog_U("X", e), GATES["X"]) for e in grid21)
    out["SINGLE_X_WORST_F"] = min(fidelity(sequence_propagator([PI], [0.0], e, 20.0), GATES["X"]) for e in grid21)
    out["SINGLE_X_D1E6_F"] = fidelity(mp_propagator(PI, 0.0, 0.0, 1e6), GATES["X"])
    out["SINGLE_H_D20_F_PLUS"] = fidelity(sequence_propagator([PI / 2], [PI / 2], 0.0, 20.0), GATES["H"])
    out["SINGLE_H_D20_F_MINUS"] = fidelity(sequence_propagator([PI / 2], [-PI / 2], 0.0, 20.0), GATES["H"])
    costs = []
    for e in grid21:
        p = populations(catalog_U("P1", e))
        costs.append(p[0] + abs(1 - p[1]))
    out["P1_WORST_COST_21"] = max(costs)
    tf = [fidelity(catalog_U("T", e), GATES["T"]) for e in np.linspace(-0.5, 0.5, 201)]
    out["T_PROFILE_201"] = tf
    eps201 = np.linspace(-0.5, 0.5, 201)
    lo = hi = 100
    while lo > 0 and tf[lo - 1] >= 0.999:
        lo -= 1
    while hi < 200 and tf[hi + 1] >= 0.999:
        hi += 1
    out["T_WIDTH_0999"] = eps201[hi] - eps201[lo]
    del out["T_PROFILE_201"]
    for k, v in out.items():
        print(f"{k} = {v!r}", flush=True)


if __name__ == "__main__":
    main()
