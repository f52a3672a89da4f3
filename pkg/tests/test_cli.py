import json
import subprocess
import sys

import pytest

from conftest import quiver, weighted_pair
from mutopo import canonical_form, class_key, to_json_dict, to_text
from mutopo.cli import main


@pytest.fixture
def files(tmp_path, a2, a3, markov, w333, cycle321, pt, i2):
    out = {}
    for name, B in [
        ("a2", a2), ("a3", a3), ("markov", markov), ("w333", w333),
        ("cycle321", cycle321), ("pt", pt), ("i2", i2),
        ("w3", weighted_pair(3)), ("w5", weighted_pair(5)),
    ]:
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(to_json_dict(B)))
        out[name] = str(path)
    out["dir"] = tmp_path
    return out


def run(capsys, *argv):
    code = main(["--no-cache" if a == "NC" else a for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestMutate:
    def test_a3_at_two_prints_the_cycle(self, capsys, files):
        code, out, _ = run(capsys, "mutate", "--at", "2", files["a3"])
        assert code == 0
        assert out == "3 0\n0 -1 1\n1 0 -1\n-1 1 0\n"

    def test_text_input_and_sequences(self, capsys, tmp_path, a3):
        path = tmp_path / "a3.txt"
        path.write_text(to_text(a3))
        code, out, _ = run(capsys, "mutate", "--at", "2", "--at", "2", str(path))
        assert code == 0
        assert out.strip() == to_text(a3)

    def test_inline_matrix(self, capsys):
        code, out, _ = run(capsys, "mutate", "--matrix", "0 1;-1 0", "--at", "1")
        assert code == 0
        assert out == "2 0\n0 -1\n1 0\n"

    def test_json_output_round_trips(self, capsys, files, tmp_path):
        code, out, _ = run(capsys, "mutate", "--at", "2", "--json", files["a3"])
        assert code == 0
        payload = json.loads(out)
        path = tmp_path / "cycle.json"
        path.write_text(json.dumps(payload["matrix"]))
        code, out2, _ = run(capsys, "mutate", "--at", "2", str(path))
        assert code == 0
        assert out2.strip() == to_text(quiver([[0, 1, 0], [-1, 0, 1], [0, -1, 0]]))

    def test_parse_error_exits_one(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"mutable": 2, "frozen": 0, "b": [[0, 1], [1, 0]]}')
        code, _, err = run(capsys, "mutate", "--at", "1", str(bad))
        assert code == 1
        assert err.startswith("error:")

    def test_missing_file_exits_one(self, capsys):
        code, _, err = run(capsys, "mutate", "--at", "1", "/no/such/file.json")
        assert code == 1
        assert "error:" in err


class TestClassAndFinite:
    def test_class_closed(self, capsys, files):
        code, out, _ = run(capsys, "class", "NC", files["a3"])
        assert code == 0
        assert out.startswith("status=CLOSED members=4")

    def test_class_json_dump_format(self, capsys, files, a3):
        code, out, _ = run(capsys, "class", "NC", "--json", files["a3"])
        payload = json.loads(out)
        assert payload["status"] == "CLOSED"
        assert payload["seed"] == canonical_form(a3).hash
        assert len(payload["members"]) == 4
        assert {"hash", "matrix", "witness"} <= set(payload["members"][0])
        assert payload["budget"]["max_entry"] == 64

    def test_class_truncated_exits_two(self, capsys, files):
        code, out, _ = run(capsys, "class", "NC", "--max-entry", "6", files["w333"])
        assert code == 2
        assert "TRUNCATED" in out

    def test_finite_markov(self, capsys, files):
        code, out, _ = run(capsys, "finite", "NC", files["markov"])
        assert code == 0
        assert out.strip() == "FINITE members=1"

    def test_finite_infinite(self, capsys, files):
        code, out, _ = run(capsys, "finite", "NC", files["w333"])
        assert code == 0
        assert out.strip() == "INFINITE"

    def test_finite_unknown_exits_two(self, capsys, files):
        code, out, _ = run(
            capsys, "finite", "NC", "--no-infinite-exit",
            "--max-members", "50", files["w333"],
        )
        assert code == 2
        assert out.strip() == "UNKNOWN"


class TestEmbeds:
    def test_yes_with_witness(self, capsys, files):
        code, out, _ = run(capsys, "embeds", "NC", files["a2"], files["a3"])
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "YES"
        assert "subset=[1, 2]" in lines[1]

    def test_exhaustive_no(self, capsys, files):
        code, out, _ = run(capsys, "embeds", "NC", files["w3"], files["markov"])
        assert code == 0
        assert out.strip() == "NO"

    def test_unknown_exits_two(self, capsys, files):
        # insufficient budget on a mutation-infinite Q: the weight-5 member
        # one mutation away is never discovered
        code, out, _ = run(
            capsys, "embeds", "NC", "--max-members", "1", files["w5"], files["cycle321"],
        )
        assert code == 2
        assert out.strip() == "UNKNOWN"

    def test_json_includes_budget(self, capsys, files):
        code, out, _ = run(capsys, "embeds", "NC", "--json", files["a2"], files["a3"])
        payload = json.loads(out)
        assert payload["verdict"] == "YES"
        assert payload["witness"]["subset"] == [1, 2]
        assert payload["budget"]["max_members"] == 100000


class TestPropertyVerbs:
    def test_avoid(self, capsys, files):
        code, out, _ = run(capsys, "avoid", "NC", files["markov"], files["i2"])
        assert (code, out.strip()) == (0, "YES")
        code, out, _ = run(capsys, "avoid", "NC", files["a3"], files["i2"])
        assert (code, out.strip()) == (0, "NO")

    def test_abundant(self, capsys, files):
        code, out, _ = run(capsys, "abundant", "NC", "-N", "2", files["markov"])
        assert (code, out.strip()) == (0, "YES")
        code, out, _ = run(capsys, "abundant", "NC", "-N", "1", files["a3"])
        assert (code, out.strip()) == (0, "NO")

    def test_acyclic(self, capsys, files):
        code, out, _ = run(capsys, "acyclic", "NC", files["markov"])
        assert (code, out.strip()) == (0, "NO")

    def test_universal(self, capsys, files):
        code, out, _ = run(capsys, "universal", "NC", "-k", "2", "-w", "2", files["a3"])
        assert (code, out.strip()) == (0, "NO")

    def test_density_witness(self, capsys, files):
        code, out, _ = run(capsys, "density-witness", files["markov"], files["a3"])
        assert code == 0
        assert out.startswith("6 0\n")
        assert "P embeds: YES" in out and "Q embeds: YES" in out


class TestUniversePipeline:
    def test_build_hasse_closure(self, capsys, files, a3):
        target = files["dir"] / "u.json"
        code, out, _ = run(
            capsys, "universe", "-r", "3", "-w", "1", "-o", str(target),
            "--cache-dir", str(files["dir"] / "cache"),
        )
        assert code == 0
        assert "classes=" in out and str(target) in out

        code, out, _ = run(capsys, "hasse", str(target), "--dot", "NC")
        assert code == 0
        assert out.startswith("digraph") and "->" in out

        code, out, _ = run(capsys, "hasse", str(target), "--json", "NC")
        assert code == 0
        payload = json.loads(out)
        assert payload["vertices"] and payload["edges"]
        assert all(e["witness"] is not None for e in payload["edges"])

        code, out, _ = run(
            capsys, "closure", str(target), files["a3"],
            "--cache-dir", str(files["dir"] / "cache"),
        )
        assert code == 0
        assert len(out.strip().splitlines()) == 4  # a3, a2, i2, pt

        key = class_key(a3).hash
        code, out_json, _ = run(
            capsys, "closure", str(target), "--class", key[:10], "--json", "NC",
        )
        assert code == 0
        assert len(json.loads(out_json)["classes"]) == 4

        code, out, _ = run(
            capsys, "open-set", str(target), files["pt"],
            "--cache-dir", str(files["dir"] / "cache"),
        )
        assert code == 0
        assert len(out.strip().splitlines()) == 7  # the whole universe

    def test_seed_order_never_changes_output(self, capsys, files):
        outputs = []
        for order in ("generated", "reversed", "shuffled"):
            code, out, _ = run(
                capsys, "universe", "-r", "2", "-w", "2", "NC", "--seed-order", order,
            )
            assert code == 0
            outputs.append(out)
        assert outputs[0] == outputs[1] == outputs[2]

    def test_jobs_flag_matches_serial(self, capsys, files):
        code, serial, _ = run(capsys, "universe", "-r", "2", "-w", "2", "NC")
        code2, parallel, _ = run(
            capsys, "universe", "-r", "2", "-w", "2", "NC", "--jobs", "2",
        )
        assert code == code2 == 0
        assert serial == parallel

    def test_unknown_relation_blocks_hasse(self, capsys, files):
        target = files["dir"] / "u33.json"
        code, _, _ = run(
            capsys, "universe", "-r", "3", "-w", "3", "-o", str(target),
            "--cache-dir", str(files["dir"] / "cache33"),
        )
        assert code == 0
        code, _, err = run(capsys, "hasse", str(target), "NC")
        assert code == 1 and "unresolved" in err
        code, out, _ = run(capsys, "hasse", str(target), "--dot", "--partial", "NC")
        assert code == 0
        assert "style=dashed" in out


class TestCache:
    def test_stats_and_compact(self, capsys, files):
        cache_dir = str(files["dir"] / "cache2")
        run(capsys, "class", files["a3"], "--cache-dir", cache_dir)
        code, out, _ = run(capsys, "cache", "stats", "--cache-dir", cache_dir)
        assert code == 0
        assert "records=1" in out
        code, out, _ = run(capsys, "cache", "compact", "--cache-dir", cache_dir)
        assert code == 0
        assert "kept=1" in out

    def test_warm_cache_repeats_output(self, capsys, files):
        cache_dir = str(files["dir"] / "cache3")
        first = run(capsys, "embeds", files["a2"], files["a3"], "--json",
                    "--cache-dir", cache_dir)
        second = run(capsys, "embeds", files["a2"], files["a3"], "--json",
                     "--cache-dir", cache_dir)
        assert first == second

    def test_env_var_selects_directory(self, capsys, files, monkeypatch):
        cache_dir = files["dir"] / "cache4"
        monkeypatch.setenv("MUTOPO_CACHE_DIR", str(cache_dir))
        code, _, _ = run(capsys, "class", files["a3"])
        assert code == 0
        assert (cache_dir / "cache.jsonl").exists()


def test_module_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "mutopo", "finite", "--no-cache", files["markov"]],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "FINITE members=1"
