import json
import os
from pathlib import Path

import numpy as np
import pytest

import saoovqe

ROOT = Path(os.environ.get("SAOOVQE_ROOT", Path(__file__).resolve().parents[2]))
H2 = ROOT / "fixtures" / "h2" / "h2.fcidump"


def h2_exact_pair():
    ints = saoovqe.read_fcidump(H2)
    return saoovqe.ActiveSpace(ints, 2, 2).exact_states()


def test_fcidump_round_trip():
    ints = saoovqe.read_fcidump(H2)
    assert ints.n_orb == 2 and ints.n_elec == 2
    again = saoovqe.parse_fcidump(saoovqe.write_fcidump(ints))
    assert again == ints
    eri = ints.eri
    assert eri.shape == (2, 2, 2, 2)
    assert np.allclose(eri, eri.transpose(1, 0, 2, 3))
    assert np.allclose(eri, eri.transpose(2, 3, 0, 1))


def test_parse_error_is_raised():
    with pytest.raises(saoovqe.ParseError):
        saoovqe.parse_fcidump("not an fcidump")


def test_pauli_sum_and_eigenvalues():
    op = saoovqe.parse_pauli_sum("1.0 Z\n")
    assert op.n_qubits == 1
    assert saoovqe.exact_eigenvalues(op, 2) == pytest.approx([-1.0, 1.0])
    op2 = saoovqe.parse_pauli_sum("0.5 XX\n0.5 YY\n")
    dense = op2.to_dense()
    assert np.allclose(dense, dense.conj().T)
    with pytest.raises(saoovqe.DimensionError):
        saoovqe.parse_pauli_sum("1 X\n1 ZZ\n")


def test_h2_matches_exact():
    ints = saoovqe.read_fcidump(H2)
    res = saoovqe.run_sa_oo_vqe(ints, 2, 2)
    e0, e1 = h2_exact_pair()
    assert res.converged
    assert abs(res.e0 - e0) < 1e-6 and abs(res.e1 - e1) < 1e-6
    assert np.trace(res.gamma("0")) == pytest.approx(2.0, abs=1e-10)
    assert np.trace(res.gamma("01")) == pytest.approx(0.0, abs=1e-10)
    assert res.Gamma("sa").shape == (2, 2, 2, 2)
    assert len(res.history()) >= 1


def test_parameter_shift_matches_finite_difference():
    ints = saoovqe.read_fcidump(H2)
    prob = saoovqe.ActiveSpace(ints, 2, 2)
    rng = np.random.default_rng(7)
    theta = rng.uniform(-1, 1, prob.n_parameters)
    g = prob.circuit_gradient(theta)
    h = 1e-5
    fd = np.array([
        (prob.sa_energy(theta + h * e) - prob.sa_energy(theta - h * e)) / (2 * h)
        for e in np.eye(prob.n_parameters)
    ])
    assert np.max(np.abs(g - fd)) < 1e-7
    with pytest.raises(saoovqe.DimensionError):
        prob.sa_energy(np.zeros(prob.n_parameters + 1))


def test_run_command_writes_json(tmp_path):
    out = tmp_path / "h2.json"
    code, _, err = saoovqe.run_command("run", config=ROOT / "configs" / "h2.toml", out=out)
    assert code == 0, err
    doc = json.loads(out.read_text())
    e0, e1 = h2_exact_pair()
    assert abs(doc["e0"] - e0) < 1e-6
    assert doc["config"]["active_space"]["electrons"] == 2


def test_run_command_exit_codes(tmp_path):
    code, _, err = saoovqe.run_command("run", config=tmp_path / "missing.toml")
    assert code == 1 and "missing.toml" in err
    op = tmp_path / "z.txt"
    op.write_text("1.0 Z\n")
    code, out, _ = saoovqe.run_command("exact", operator=op)
    assert code == 0
    assert [float(l.split(",")[1]) for l in out.strip().splitlines()[1:]] == [-1.0, 1.0]


def test_config_json_materializes_defaults():
    cfg = json.loads(saoovqe.config_json(ROOT / "configs" / "h2.toml"))
    assert cfg["optimizer"]["method"] == "bfgs"
    assert cfg["ensemble"]["weights"] == [0.5, 0.5]
