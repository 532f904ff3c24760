"""Monte-Carlo harness invariants and command line behavior."""

import json

import pytest

from conftest import SYN_L, TRAP_L, ident
from iccsi import (
    Matrix,
    SimConfig,
    field_new,
    make_encoder,
    make_instance,
    run_simulation,
    save_encoder,
    save_instance,
    wilson_interval,
)
from iccsi.cli import main
from iccsi.decoders import write_frame
from iccsi.harness import resolve_encoder

F2 = field_new(2, 1)


def _syn_encoder(syn_inst):
    return make_encoder(Matrix(F2, SYN_L), syn_inst, "manual")


# -- wilson interval --------------------------------------------------


def test_wilson_degenerate_and_extremes():
    assert wilson_interval(0, 0) == (0.0, 1.0)
    lo, hi = wilson_interval(50, 50)
    assert hi == pytest.approx(1.0)
    assert 0.9 < lo < 1.0
    lo, hi = wilson_interval(0, 50)
    assert lo == pytest.approx(0.0)
    assert 0.0 < hi < 0.1


def test_wilson_contains_estimate_and_shrinks():
    for s, n in ((3, 10), (57, 100), (999, 1000)):
        lo, hi = wilson_interval(s, n)
        assert 0.0 <= lo <= s / n <= hi <= 1.0
    w100 = wilson_interval(60, 100)
    w10000 = wilson_interval(6000, 10000)
    assert w10000[1] - w10000[0] < w100[1] - w100[0]


# -- simulation invariants --------------------------------------------


def test_sim_within_design_all_succeed(syn_inst):
    cfg = SimConfig(
        instance="mem", metric="hamming", delta=1, error_weight=1,
        trials=200, seed=3,
    )
    rep = run_simulation(cfg, inst=syn_inst, encoder=_syn_encoder(syn_inst))
    assert rep.trials == 200
    for u in rep.users:
        assert (u.success, u.detected, u.undetected) == (200, 0, 0)


def test_sim_beyond_design_outcome_mix(syn_inst):
    cfg = SimConfig(
        instance="mem", metric="hamming", delta=1, error_weight=2,
        trials=150, seed=0,
    )
    rep = run_simulation(cfg, inst=syn_inst, encoder=_syn_encoder(syn_inst))
    for u in rep.users:
        assert u.success + u.detected + u.undetected == 150
        assert u.detected > 0
    assert any(u.undetected > 0 for u in rep.users)


def test_sim_deterministic_and_seed_sensitive(syn_inst):
    enc = _syn_encoder(syn_inst)
    base = dict(
        instance="mem", metric="hamming", delta=1, error_weight=2, trials=150
    )
    first = run_simulation(SimConfig(**base, seed=0), inst=syn_inst, encoder=enc)
    again = run_simulation(SimConfig(**base, seed=0), inst=syn_inst, encoder=enc)
    other = run_simulation(SimConfig(**base, seed=1), inst=syn_inst, encoder=enc)
    assert first.stable_json() == again.stable_json()
    assert first.stable_json() != other.stable_json()
    doc = first.to_dict()
    assert "wall_time" in doc
    assert "wall_time" not in json.loads(first.stable_json())
    assert doc["config"]["seed"] == 0


def test_sim_report_shape(syn_inst):
    cfg = SimConfig(instance="mem", trials=5, seed=9)
    rep = run_simulation(cfg, inst=syn_inst, encoder=_syn_encoder(syn_inst))
    doc = rep.to_dict()
    assert len(doc["users"]) == 4
    for u in doc["users"]:
        lo, hi = u["wilson"]
        assert 0.0 <= lo <= u["rate"] <= hi <= 1.0


def test_sim_guarantee_gate(syn_inst):
    # the length-2 coset encoder realizes the instance but corrects nothing
    cfg = SimConfig(
        instance="mem", encoder="coset", metric="hamming", delta=1,
        trials=5, guarantee=True,
    )
    with pytest.raises(ValueError, match="fails hamming verification"):
        run_simulation(cfg, inst=syn_inst)
    ok = SimConfig(
        instance="mem", metric="hamming", delta=1, error_weight=1,
        trials=5, guarantee=True,
    )
    rep = run_simulation(ok, inst=syn_inst, encoder=_syn_encoder(syn_inst))
    assert all(u.success == 5 for u in rep.users)


def test_sim_validation_errors(syn_inst):
    enc = _syn_encoder(syn_inst)
    with pytest.raises(ValueError):
        run_simulation(
            SimConfig(instance="mem", metric="euclid"), inst=syn_inst, encoder=enc
        )
    with pytest.raises(ValueError):
        run_simulation(
            SimConfig(instance="mem", trials=0), inst=syn_inst, encoder=enc
        )
    with pytest.raises(ValueError):
        run_simulation(
            SimConfig(instance="mem", error_weight=6), inst=syn_inst, encoder=enc
        )
    with pytest.raises(ValueError):
        run_simulation(
            SimConfig(instance="mem", delta=-1), inst=syn_inst, encoder=enc
        )


def test_sim_rank_mode_invariants(trap_inst):
    enc = make_encoder(Matrix(F2, TRAP_L), trap_inst, "manual")
    cfg = SimConfig(
        instance="mem", metric="rank", error_weight=1, trap_pad=2,
        trials=150, seed=5,
    )
    rep = run_simulation(cfg, inst=trap_inst, encoder=enc)
    detected = {u.detected for u in rep.users}
    # a trapping escape is a broadcast-level event, shared by every user
    assert len(detected) == 1 and detected.pop() > 0
    for u in rep.users:
        assert u.success + u.detected + u.undetected == 150
        assert u.success > 0


def test_sim_rank_noise_free_with_private_lvs(trap_inst):
    enc = make_encoder(Matrix(F2, TRAP_L), trap_inst, "manual")
    cfg = SimConfig(
        instance="mem", metric="rank", error_weight=0, trap_pad=1,
        trials=40, seed=2, lvs_shared=False,
    )
    rep = run_simulation(cfg, inst=trap_inst, encoder=enc)
    assert all(u.success == 40 for u in rep.users)


# -- encoder resolution -----------------------------------------------


def test_resolve_encoder_coset(syn_inst):
    enc = resolve_encoder(SimConfig(instance="mem"), syn_inst)
    assert enc.N == 2 and enc.provenance == "coset"


def test_resolve_encoder_random(syn_inst):
    enc = resolve_encoder(
        SimConfig(instance="mem", encoder="random", seed=1), syn_inst
    )
    assert enc.N == 2 and enc.provenance == "random"


def test_resolve_encoder_file(tmp_path, syn_inst):
    path = tmp_path / "enc.json"
    save_encoder(_syn_encoder(syn_inst), path)
    enc = resolve_encoder(SimConfig(instance="mem", encoder=str(path)), syn_inst)
    assert enc.N == 5
    assert enc.L == Matrix(F2, SYN_L)


# -- command line -----------------------------------------------------


@pytest.fixture
def inst_file(tmp_path, syn_inst):
    path = tmp_path / "inst.json"
    save_instance(syn_inst, path)
    return str(path)


def test_cli_validate_ok(inst_file, capsys):
    assert main(["validate", "--instance", inst_file]) == 0
    out = capsys.readouterr().out
    assert "ok: m=4 users, n=4 rows of t=1 symbols over GF(2)" in out


def test_cli_validate_missing_file(tmp_path, capsys):
    code = main(["validate", "--instance", str(tmp_path / "nope.json")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_cli_validate_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"p": 2, "e": 1, "t": 1}')
    assert main(["validate", "--instance", str(bad)]) == 2


def test_cli_minrank(inst_file, capsys):
    assert main(["minrank", "--instance", inst_file]) == 0
    out = capsys.readouterr().out
    assert "kappa: 2" in out
    assert "alpha: 2" in out
    assert "length bracket at delta=0: [2, 2]" in out


def test_cli_minrank_budget_exceeded(tmp_path, capsys):
    # one user caching a 23-dimensional space makes the coset scan
    # 2^23 > the default enumeration budget
    n = 24
    users = [([[1 if j == r else 0 for j in range(n)] for r in range(n - 1)],
              [1 if j == n - 1 else 0 for j in range(n)])]
    inst = make_instance(F2, 1, n, ident(n), users)
    path = tmp_path / "big.json"
    save_instance(inst, path)
    assert main(["minrank", "--instance", str(path)]) == 4
    assert "budget" in capsys.readouterr().err


def test_cli_bounds_single_query(capsys):
    code = main([
        "bounds", "--bound", "subspace", "--q", "4", "--dS", "10",
        "--N", "1", "--m", "2", "--d", "9",
    ])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("name,q,t,n,N,delta,m,value,verdict")
    cells = lines[1].split(",")
    assert cells[-2] == "0.5"
    assert cells[-1] == "true"


def test_cli_bounds_table4_to_file(tmp_path):
    out = tmp_path / "t4.csv"
    assert main(["bounds", "--table4", "--out", str(out)]) == 0
    rows = out.read_text().strip().splitlines()
    assert len(rows) == 1 + 24
    assert all(r.rsplit(",", 1)[1] == "true" for r in rows[1:])


def test_cli_bounds_requires_selection(capsys):
    assert main(["bounds"]) == 2


def test_cli_encode_coset(inst_file, tmp_path, capsys):
    out = tmp_path / "enc.json"
    code = main([
        "encode", "--instance", inst_file, "--method", "coset",
        "--out", str(out),
    ])
    assert code == 0
    assert "N=2 provenance=coset" in capsys.readouterr().out
    assert json.loads(out.read_text())["N"] == 2


def test_cli_encode_random_impossible_length(inst_file, capsys):
    code = main([
        "encode", "--instance", inst_file, "--method", "random",
        "--length", "1", "--attempts", "50",
    ])
    assert code == 2
    assert "no length-1 encoder" in capsys.readouterr().err


def test_cli_decode_roundtrip(inst_file, tmp_path, capsys, syn_inst):
    enc_path = tmp_path / "enc.json"
    save_encoder(_syn_encoder(syn_inst), enc_path)
    X = Matrix.column_vector(F2, (1, 1, 1, 1))
    word = Matrix(F2, SYN_L) * X + Matrix.column_vector(F2, (0, 0, 0, 1, 0))
    frame = tmp_path / "y.bin"
    with open(frame, "wb") as fh:
        write_frame(fh, word, v=0, ell=1)
    side = tmp_path / "side.json"
    lam = syn_inst.users[3].V * X
    side.write_text(json.dumps([list(r) for r in lam.rows]))
    code = main([
        "decode", "--frame", str(frame), "--instance", inst_file,
        "--encoder", str(enc_path), "--user", "3", "--side", str(side),
        "--delta", "1",
    ])
    assert code == 0
    assert "demand: 1" in capsys.readouterr().out


def test_cli_decode_failure_exit(inst_file, tmp_path, capsys, syn_inst):
    enc_path = tmp_path / "enc.json"
    save_encoder(_syn_encoder(syn_inst), enc_path)
    X = Matrix.column_vector(F2, (1, 1, 1, 1))
    word = Matrix(F2, SYN_L) * X + Matrix.column_vector(F2, (1, 0, 0, 1, 0))
    frame = tmp_path / "y.bin"
    with open(frame, "wb") as fh:
        write_frame(fh, word, v=0, ell=1)
    side = tmp_path / "side.json"
    lam = syn_inst.users[3].V * X
    side.write_text(json.dumps([list(r) for r in lam.rows]))
    code = main([
        "decode", "--frame", str(frame), "--instance", inst_file,
        "--encoder", str(enc_path), "--user", "3", "--side", str(side),
        "--delta", "1",
    ])
    assert code == 3
    assert "SyndromeNotFound" in capsys.readouterr().err


def test_cli_decode_field_mismatch(inst_file, tmp_path, capsys):
    f3 = field_new(3, 1)
    frame = tmp_path / "y3.bin"
    with open(frame, "wb") as fh:
        write_frame(fh, Matrix.zeros(f3, 5, 1), v=0, ell=1)
    side = tmp_path / "side.json"
    side.write_text("[[0],[0]]")
    code = main([
        "decode", "--frame", str(frame), "--instance", inst_file,
        "--user", "0", "--side", str(side),
    ])
    assert code == 2
    assert "field does not match" in capsys.readouterr().err


def test_cli_simulate(inst_file, tmp_path, capsys, syn_inst):
    enc_path = tmp_path / "enc.json"
    save_encoder(_syn_encoder(syn_inst), enc_path)
    report = tmp_path / "report.json"
    code = main([
        "simulate", "--instance", inst_file, "--encoder", str(enc_path),
        "--delta", "1", "--error-weight", "1", "--trials", "25",
        "--out", str(report),
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "user 0: success 25/25" in out
    assert "wall time:" in out
    doc = json.loads(report.read_text())
    assert doc["trials"] == 25
    assert "wall_time" in doc
    assert all(u["success"] == 25 for u in doc["users"])
