"""Smoke test for the softdress extension module.

    cd crates/python && maturin develop --release && python python/smoke_test.py
"""

import math

import softdress as sd


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    a = sd.Particle([0.0, 0.0, 0.6])
    b = sd.Particle([0.0, 0.0, -0.6])
    close(a.gamma, 1.25, 1e-15)
    p = a.momentum()
    close(p[0] ** 2 - sum(x * x for x in p[1:]), 1.0, 1e-12)

    br = sd.soft_breakdown(a, b)
    assert abs(br["c_F"]) < 1e-10 and abs(br["c_D"]) > 1e-3, br
    off = sd.soft_breakdown(a, b, dressing_v1=[0.0, 0.0, 0.55])
    assert abs(off["c_F"]) > 1e-4, off

    rows = sd.regulator_scan(a, b, [0.1, 0.01, 0.001])
    e_f = [r[3] for r in rows]
    assert max(e_f) - min(e_f) <= 1e-8 * e_f[0], rows

    pa = sd.make_on_shell(1.0, [0.0, 0.0, 0.5])
    pb = sd.make_on_shell(1.0, [0.0, 0.0, -0.5])
    close(sd.two_particle_phase_coefficient(pa, pb), 5.0 / (16.0 * math.pi), 1e-14)

    close(sd.green_g([0.0, 0.0, 2.0], [0.0, 0.0, 0.9]), -1.0 / (8.0 * math.pi), 1e-15)

    overlap, occ = sd.fock_displacement([1.0 + 0.0j])
    close(overlap, math.exp(-0.5), 1e-8)
    close(occ[0], 1.0, 1e-8)
    alpha, beta = 0.4 + 0.3j, -0.2 + 0.5j
    close(abs(sd.hadamard_phase([alpha], [beta]) - 2j * (alpha * beta.conjugate()).imag), 0.0, 1e-8)

    s = 2 ** -0.5
    close(sd.entanglement_entropy([0, s, -s, 0], f=0.3), math.log(2.0), 1e-12)
    rho = [[0.5, 0.1j], [-0.1j, 0.5]]
    assert sd.dressed_entropy_identity_residual(rho, 0.2) < 1e-10

    n = sd.expected_photon_number([a, b], 1e-3, 1.0)
    close(sd.vacuum_overlap(n), math.exp(-n / 2.0), 1e-15)

    csv = sd.run_config("scan", "[particles]\nv1 = [0.0, 0.0, 0.6]\nv2 = [0.0, 0.0, -0.6]\n")
    assert csv.splitlines()[1] == "lambda,expD,expC,expF", csv

    try:
        sd.Particle([0.0, 0.0, 1.5])
    except ValueError:
        pass
    else:
        raise AssertionError("superluminal particle accepted")

    print(f"softdress {sd.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
