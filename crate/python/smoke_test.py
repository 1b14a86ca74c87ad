"""Smoke test for the contact_thermo_py extension module.

Build and install first, e.g.
    maturin develop -m crates/py/Cargo.toml
then run
    python python/smoke_test.py
"""

import json
import math

import contact_thermo_py as ct


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    ch = ct.gas_chord(1.0, 5.0, 2.0)
    assert (ch.q, ch.p) == (-0.5, 2.0), ch
    assert close(ch.length, 4 * math.log(2), 1e-12)
    found = ct.find_chords("gas", 1.0, 5.0, 2.0)
    assert len(found) == 1 and close(found[0].q, -0.5, 1e-8), found

    cw = ct.cw_chord(2.0, 10.0 / 3.0, 1.0, 1.0)
    assert close(cw.p, math.tanh(0.75), 1e-14)
    assert close(cw.q + cw.p, 1.5, 1e-12)
    assert [c.direction for c in ct.find_chords("cw", 2.0, 10.0 / 3.0, 1.0, b=1.0)] == [1]

    roots = ct.cw_roots(0.0, 0.5, 1.0)
    assert len(roots) == 3 and sum(r[2] == "unstable" for r in roots) == 1, roots

    assert ct.eval_reduced_form(0.0, [2.0], [-0.5], 1.0, [0.0], [0.25]) == 0.5
    assert ct.eval_extended_form(0.0, 1.0, 2.0, [1.0], [0.0], 1.0, 0.0, 0.5, [0.0], [0.0]) == 0.5

    spec = {"labels": ["a", "b", "c"], "weights": [1, 1, 2], "v_int": [0, 0.5, 1], "v_bar": [[1, 0, -1]]}
    sys_ = ct.System.from_json(json.dumps(spec))
    rho_g, g_star = sys_.gibbs(1.5, [-0.3])
    assert close(sum(w * r for w, r in zip(spec["weights"], rho_g)), 1.0, 1e-12)
    assert sys_.free_energy(1.5, [-0.3], [0.25, 0.25, 0.25]) >= g_star
    trace = sys_.relax([-0.3], 1.5, [0.7, 0.2, 0.05], t_end=40.0)
    assert trace["terminal_tv"] < 1e-6 and min(trace["form"]) >= -1e-8
    assert all(b <= a + 1e-12 for a, b in zip(trace["G"], trace["G"][1:]))
    try:
        ct.System([0.0, 1.0], [[1.0]])
    except ValueError:
        pass
    else:
        raise AssertionError("ragged Hamiltonian accepted")

    signs = [s["form_sign"] for s in ct.stirling_cycle(1.0, 5.0, 1.5, 2.0)]
    assert signs == ["zero", "negative", "zero", "positive"], signs

    paths = ct.slow_isotopy("gas", [-0.5, -1.0])
    assert all(p["nonnegative"] for p in paths)
    z_end = paths[0]["coords"][-1][0]
    assert close(z_end, 5 * math.log(2), 1e-10), z_end

    try:
        ct.slow_isotopy("cw", [0.05], t0=0.5, t1=2.0, back1=0.0, b=1.0)
    except RuntimeError:
        pass
    else:
        raise AssertionError("lost branch not reported")

    print("smoke test passed")


if __name__ == "__main__":
    main()
