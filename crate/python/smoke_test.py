"""Smoke test for the secnc Python module.

Build and install first:
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/secnc-*.whl
"""

import random

import secnc


def main():
    s = secnc.Scheme(m=4, n=4, t=1, mu=1, k=1)
    assert (s.n, s.m, s.q, s.t, s.mu, s.k) == (4, 4, 2, 1, 1, 1)
    assert s.outer_distance == 3 and s.rate_bits == 4.0

    rng = random.Random(1)
    for _ in range(200):
        msg = [rng.randrange(16)]
        x = s.encode(msg, seed=rng.randrange(2**32))
        # one injected packet hitting a random row
        y = s.expand(x)
        row = rng.randrange(4)
        y[row] = [b ^ rng.randrange(2) for b in y[row]]
        ident = [[int(i == j) for j in range(4)] for i in range(4)]
        assert s.coherent_decode(y, ident) == msg

        lifted = s.lift(x)
        lifted[rng.randrange(4)][rng.randrange(8)] ^= 1
        assert s.noncoherent_decode(lifted) == msg

    assert s.encode([0], randomness=[0]) == [0, 0, 0, 0]

    report = s.secrecy_audit()
    assert report["holds"] is True and report["max_leakage_bits"] == 0.0
    assert len(report["records"]) == 15

    broken = secnc.Scheme(m=4, n=4, t=1, mu=1, k=1, break_mrd=True)
    assert broken.secrecy_audit()["max_leakage_bits"] > 0.0

    rel = s.reliability_audit(random_transfers=2, seed=3)
    assert rel["holds"] and rel["failures"] == 0

    assert secnc.rank([[1, 0, 1], [0, 1, 1], [1, 1, 0]]) == 2
    assert secnc.rank_distance([[1, 0], [0, 1]], [[0, 0], [0, 0]]) == 2
    assert [secnc.gabidulin_min_distance(4, 4, k) for k in (1, 2, 3)] == [4, 3, 2]

    try:
        secnc.Scheme(m=4, n=4, t=1, mu=1, k=2)
    except ValueError as e:
        assert "rate bound" in str(e)
    else:
        raise AssertionError("over-rate parameters accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
