import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from poslab import cli
from poslab.kernels import constant_kernel
from poslab.structures import complete_graph, cycle_graph, graph, path_graph, star_graph, tight_cycle


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        path = tmp_path / name
        text = obj if isinstance(obj, str) else obj.to_text()
        path.write_text(text)
        return str(path)

    return _write


def call(*argv):
    buf = io.StringIO()
    code = cli.run(list(argv), out=buf)
    return code, buf.getvalue()


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_density(write):
    g = write("k3.txt", complete_graph(3))
    k = write("w.json", constant_kernel(2, -1).to_json())
    code, out = call("density", "--input", g, "--kernel", k)
    assert code == 0 and records(out) == [{"density": "-1"}]


def test_density_uniformity_mismatch(write):
    h = write("c6.txt", tight_cycle(3, 6))
    k = write("w.json", constant_kernel(2, -1).to_json())
    assert call("density", "--input", h, "--kernel", k)[0] == 2


def test_io_errors(write, tmp_path):
    assert call("indpoly", "--input", str(tmp_path / "missing.txt"))[0] == 4
    bad = write("bad.txt", "2 3\n0 1\n")
    assert call("indpoly", "--input", bad)[0] == 4
    assert call("indpoly")[0] == 4
    g = write("k2.txt", complete_graph(2))
    assert call("density", "--input", g, "--kernel", write("w.json", "{not json"))[0] == 4


def test_budget_exit(write):
    g = write("k3.txt", complete_graph(3))
    assert call("max-code", "--input", g, "--n", "6")[0] == 3


def test_indpoly(write):
    code, out = call("indpoly", "--input", write("p3.txt", path_graph(3)))
    rec = records(out)[0]
    assert code == 0 and rec["polynomial"] == ["1", "-3", "1"]
    lo, hi = map(Fraction, rec["bracket"])
    assert float(lo) < (3 - 5**0.5) / 2 < float(hi)


def test_certify_odd_and_verify(write, tmp_path):
    code, out = call("certify-odd", "--input", write("star.txt", star_graph(3)))
    rec = records(out)[0]
    assert code == 0 and set(rec) >= {"alpha", "density", "polynomial"}
    assert Fraction(rec["density"]) < 0
    assert call("certify-odd", "--input", write("p3.txt", path_graph(3)))[0] == 2
    log = tmp_path / "certs.jsonl"
    log.write_text(out)
    code, replay = call("--verify", str(log))
    assert code == 0 and records(replay)[0]["valid"]
    rec["density"] = "-1"
    log.write_text(json.dumps(rec) + "\n")
    code, replay = call("--verify", str(log))
    assert code == 2 and not records(replay)[0]["valid"]


def test_levi(write):
    code, out = call("levi", "--input", write("c5.txt", tight_cycle(3, 5)))
    assert code == 0 and records(out)[0]["kind"] == "levi-witness"


def test_copy_prob_c6(write):
    code, out = call("copy-prob", "--input", write("c6.txt", tight_cycle(3, 6)))
    rec = records(out)[0]
    assert code == 0 and rec["probability"] == "1/2048"
    assert rec["rank"] == 11 and rec["consistent"]


def test_qvanish(write):
    pendant = graph(5, cycle_graph(4).edges + ((0, 4),))
    code, out = call("qvanish", "--input", write("pc4.txt", pendant), "--family", "[[1]]")
    assert code == 0 and records(out)[0]["vanishing"]
    code, out = call("qvanish", "--input", write("c6.txt", tight_cycle(3, 6)))
    assert code == 0 and not records(out)[0]["vanishing"]
    assert call("qvanish", "--input", write("c6b.txt", tight_cycle(3, 6)), "--family", "[[1,")[0] == 4


def test_build_hq():
    code, out = call("build-hq", "--r", "3", "--family", "[[1,2],[3]]")
    rec = records(out)[0]
    assert code == 0 and rec["edges"] == 4
    assert call("build-hq")[0] == 2


def test_mc_density_csv_and_determinism(write):
    h = write("edge.txt", "3 3 1\n0 1 2\n")
    args = ("mc-density", "--input", h, "--seed", "7", "--n", "30", "--samples", "2000", "--format", "csv")
    code, out = call(*args)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "H-name,r,n,samples,estimate,stderr,seed"
    assert lines[1].startswith("edge,3,30,2000,") and lines[1].endswith(",7")
    assert call(*args)[1] == out
    assert call("mc-density", "--input", h)[0] == 2


def test_minimize_is_deterministic(write, monkeypatch):
    g = write("k3.txt", complete_graph(3))
    args = ("minimize", "--input", g, "--seed", "1", "--restarts", "3", "--steps", "60")
    monkeypatch.setenv("POSLAB_THREADS", "1")
    first = call(*args)
    monkeypatch.setenv("POSLAB_THREADS", "3")
    second = call(*args)
    assert first == second and records(first[1])[0]["value"] == "-1"


def test_code_commands(write):
    g = write("k3.txt", complete_graph(3))
    code, out = call("code-spectrum", "--input", g, "--n", "4")
    rows = records(out)
    assert code == 0 and len(rows) == 64
    assert rows[-1] == {"x": "n=4:3f", "coefficient": "-1/16"}
    code, out = call("code-spectrum", "--input", g, "--n", "3", "--format", "csv")
    assert out.splitlines()[0] == "x-hex,coefficient" and len(out.splitlines()) == 9
    code, out = call("code-bound", "--input", g, "--n", "4")
    assert code == 0 and "bound" in records(out)[0]
    code, out = call("max-code", "--input", g, "--n", "4")
    assert code == 0 and records(out)[0]["size"] == 32
    assert call("code-bound", "--input", g)[0] == 2


def test_stable_involution_and_verify(write, tmp_path):
    k23 = graph(5, [(a, b) for a in (0, 1) for b in (2, 3, 4)])
    code, out = call("stable-involution", "--input", write("k23.txt", k23))
    assert code == 0 and records(out)[0]["found"]
    _, out2 = call("stable-involution", "--input", write("c5.txt", cycle_graph(5)))
    assert not records(out2)[0]["found"]
    log = tmp_path / "si.jsonl"
    log.write_text(out + out2)
    code, replay = call("--verify", str(log))
    assert code == 0 and all(r["valid"] for r in records(replay))


def test_verify_mixed_log(write, tmp_path):
    lines = []
    lines += call("copy-prob", "--input", write("c6.txt", tight_cycle(3, 6)))[1].splitlines()
    pendant = graph(5, cycle_graph(4).edges + ((0, 4),))
    lines += call("qvanish", "--input", write("pc4.txt", pendant), "--family", "[[1]]")[1].splitlines()
    lines += call("levi", "--input", write("c5.txt", tight_cycle(3, 5)))[1].splitlines()
    log = tmp_path / "all.jsonl"
    log.write_text("\n".join(lines) + "\n")
    code, replay = call("--verify", str(log))
    assert code == 0 and [r["kind"] for r in records(replay)] == ["copy-probability", "q-vanishing", "levi-witness"]
    log.write_text('{"kind": "mystery"}\n')
    assert call("--verify", str(log))[0] == 4


def test_no_command_and_bad_seed(write):
    assert call()[0] == 2
    g = write("k3.txt", complete_graph(3))
    assert call("minimize", "--input", g, "--seed", "-1")[0] == 2


def test_console_entry_point(write):
    g = write("c6.txt", tight_cycle(3, 6))
    proc = subprocess.run([sys.executable, "-m", "poslab", "copy-prob", "--input", g], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["probability"] == "1/2048"
