import io
import json


from bipsym.cli import main


def run(*argv):
    buf = io.StringIO()
    status = main(list(argv), stdout=buf)
    return status, buf.getvalue()


def test_chi():
    assert run("chi", "--k", "8", "--l", "8") == (0, "256\n")
    status, out = run("chi", "--k", "9", "--l", "10", "--construct", "--output", "json")
    rec = json.loads(out)
    assert status == 0 and rec["construction_ok"] and rec["chi"] == str(2 ** 14)
    status, out = run("chi", "--k", "4", "--l", "2", "--oracle", "--output", "json")
    assert status == 0 and json.loads(out)["oracle"] == "8"
    status, out = run("chi", "--k", "2", "--l", "3", "--oracle", "--output", "json")
    assert status == 0 and json.loads(out)["oracle"] == "8"


def test_chi_outside_range_is_usage_error(capsys):
    status, _ = run("chi", "--k", "5", "--l", "7")
    assert status == 2
    assert "k >= 8" in capsys.readouterr().err


def test_mu():
    assert run("mu", "--k", "2", "--l", "2") == (0, "8\n")
    status, out = run("mu", "--k", "3", "--l", "2", "--oracle", "--output", "json")
    assert status == 0 and json.loads(out)["oracle_ok"]


def test_construct_text():
    status, out = run("construct", "--k", "8", "--l", "16")
    assert status == 0
    lines = out.splitlines()
    assert lines[0].startswith("# provenance staircase-r0")
    assert lines[1] == "8 16"
    assert lines[2] == "3 1 2 2 2 2 2 2"


def test_stab(tmp_path):
    f = tmp_path / "m.txt"
    f.write_text("3 3\n1 1 1\n1 1 1\n1 1 1\n")
    status, out = run("stab", "--matrix", str(f))
    assert status == 0
    assert json.loads(out) == {"order_KN": 36, "partwise_fixed": False, "aut_order": "36"}
    status, out = run("stab", "--matrix", str(f), "--generators")
    assert len(json.loads(out)["generators"]) >= 2
    f.write_text("2 2\n1 0\n0 2\n")
    assert run("stab", "--matrix", str(f))[0] == 2
    assert run("stab", "--matrix", str(tmp_path / "missing.txt"))[0] == 2


def test_enumerate():
    status, out = run("enumerate", "--k", "3", "--l", "2", "--stats", "--output", "json")
    rec = json.loads(out)
    assert status == 0 and rec["count"] == "21" and rec["min_aut"] == "6" and rec["max_aut"] == "48"
    assert run("enumerate", "--k", "4", "--l", "4", "--budget", "10")[0] == 2


def test_count_csv():
    status, out = run("count", "--k", "3", "--lmax", "4", "--fit")
    assert status == 0
    lines = out.splitlines()
    assert lines[0] == "l,H_3(l),min_aut,max_aut,trivial_KN_fraction,factexp_ratio"
    assert lines[2].startswith("1,6,6,6,")
    assert lines[3].startswith("2,21,6,48,")
    assert "held_out_ok True" in out


def test_bn():
    assert run("bn", "--nmax", "2") == (0, "1\n1\n3\n")
    status, out = run("bn", "--nmax", "30", "--verify", "--output", "json")
    rec = json.loads(out)
    assert status == 0 and rec["values"][4] == "37" and rec["comps_bound_violations"] == []


def test_sample_reproducible():
    a = run("sample", "--k", "3", "--l", "5", "--n", "20", "--output", "csv")
    b = run("sample", "--k", "3", "--l", "5", "--n", "20", "--output", "csv")
    assert a == b and a[0] == 0
    assert a[1].splitlines()[0] == "x11,x12,x13,x21,x22,x23,x31,x32,x33"
    assert len(a[1].splitlines()) == 21
    c = run("sample", "--k", "3", "--l", "5", "--n", "20", "--output", "csv", "--seed", "1")
    assert c != a


def test_sample_stats():
    status, out = run("sample", "--k", "2", "--l", "101", "--n", "200", "--stat", "sym", "--output", "json")
    rec = json.loads(out)
    assert status == 0 and rec["KN_orders"] == {"2": 200}
    status, out = run("sample", "--k", "2", "--l", "2", "--n", "20000", "--stat", "rate", "--output", "json")
    rec = json.loads(out)
    assert rec["ci"][0] <= 3 / 32 <= rec["ci"][1]
    status, out = run("sample", "--k", "3", "--l", "1000", "--n", "100", "--stat", "dev", "--fexp", "0.5",
                      "--output", "json")
    assert status == 0 and 0 <= json.loads(out)["fraction"] <= 1


def test_sync(tmp_path):
    f = tmp_path / "w.txt"
    status, out = run("sync", "--k", "3", "--l", "3", "--emit-witness", str(f), "--output", "json")
    rec = json.loads(out)
    assert status == 0 and rec["clique_size"] == rec["color_count"] == 28
    assert f.read_text().startswith("3 3 1\n")


def test_usage_errors():
    assert run("nonsense")[0] == 2
    assert run("chi", "--k", "8")[0] == 2
    assert run("sample", "--k", "3", "--l", "4", "--n", "0")[0] == 2
    assert run("sync", "--k", "5", "--l", "3")[0] == 2


def test_module_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "bipsym", "bn", "--nmax", "3"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout == "1\n1\n3\n9\n"
