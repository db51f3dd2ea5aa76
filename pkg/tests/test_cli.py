import json
import subprocess
import sys

import pytest

from sdkit import FinSet, Graph, Subobject, decomposition_from_json
from sdkit.cli import run


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, out


def fx(fixtures_dir, name):
    return str(fixtures_dir / name)


class TestVerbs:
    def test_solve_reports_the_four_edge_path(self, capsys, fixtures_dir):
        code, out = invoke(
            capsys,
            "solve",
            "--property",
            "paths",
            "--objective",
            "max-edges",
            "-g",
            fx(fixtures_dir, "bowtie.json"),
            "-d",
            fx(fixtures_dir, "bowtie.dec.json"),
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["value"] == 4
        assert payload["stats"]["pairCompositions"] == 289
        witness = Subobject.from_json(payload["witness"])
        assert len(witness.edges) == 4

    def test_treewidth_of_k5(self, capsys, fixtures_dir):
        code, out = invoke(capsys, "treewidth", "-g", fx(fixtures_dir, "k5.json"))
        assert code == 0
        assert json.loads(out) == {"treewidth": 4}

    def test_colim_lists_nine_elements(self, capsys, fixtures_dir):
        code, out = invoke(capsys, "colim", "-d", fx(fixtures_dir, "five_bag_tree.dec.json"))
        assert code == 0
        payload = json.loads(out)
        assert payload["valueKind"] == "finset"
        assert FinSet.from_json(payload["object"]) == FinSet(9)
        assert len(payload["cocone"]) == 5

    def test_check_clean_decomposition(self, capsys, fixtures_dir):
        code, out = invoke(capsys, "check", "-d", fx(fixtures_dir, "completion_dh.dec.json"))
        assert code == 0
        assert json.loads(out) == {"violations": []}

    def test_check_reports_violations(self, capsys, tmp_path, fixtures_dir):
        data = json.load(open(fx(fixtures_dir, "five_bag_tree.dec.json")))
        data["bags"] = data["bags"][:-1]
        bad = tmp_path / "bad.dec.json"
        bad.write_text(json.dumps(data))
        code, out = invoke(capsys, "check", "-d", str(bad))
        assert code == 2
        assert json.loads(out)["violations"]

    def test_to_arrow_and_back(self, capsys, tmp_path, fixtures_dir):
        code, out = invoke(capsys, "to-arrow", "-d", fx(fixtures_dir, "five_bag_tree.dec.json"))
        assert code == 0
        arrow_file = tmp_path / "arrow.json"
        arrow_file.write_text(out)
        code, out2 = invoke(capsys, "from-arrow", "--arrow", str(arrow_file))
        assert code == 0
        recovered = decomposition_from_json(json.loads(out2))
        assert FinSet(9) == __import__("sdkit").evaluate_colimit(recovered)[0]

    def test_restrict_outputs_a_decomposition(self, capsys, tmp_path, fixtures_dir):
        # complete the finite-set fixture by hand: the graph-valued bowtie
        # decomposition restricted along a 4-edge subgraph of its colimit
        sub = Graph(5, [(0, 2), (1, 2), (1, 4), (3, 4)])
        sub_file = tmp_path / "sub.json"
        sub_file.write_text(json.dumps(sub.to_json()))
        code, out = invoke(
            capsys,
            "restrict",
            "-d",
            fx(fixtures_dir, "bowtie.dec.json"),
            "-g",
            str(sub_file),
        )
        assert code == 0
        restricted = decomposition_from_json(json.loads(out))
        assert [b.vertices for b in restricted.bags] == [3, 3]

    def test_chordal_and_clique_tree(self, capsys, fixtures_dir):
        code, out = invoke(capsys, "chordal", "-g", fx(fixtures_dir, "completion_h.json"))
        assert code == 0
        assert json.loads(out)["chordal"] is True
        code, out = invoke(capsys, "clique-tree", "-g", fx(fixtures_dir, "completion_h.json"))
        assert code == 0
        d = decomposition_from_json(json.loads(out))
        assert len(d.bags) == 5

    def test_clique_tree_rejects_non_chordal(self, capsys, tmp_path):
        c4 = tmp_path / "c4.json"
        c4.write_text(json.dumps(Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).to_json()))
        code, out = invoke(capsys, "clique-tree", "-g", str(c4))
        assert code == 2
        assert "chordal" in json.loads(out)["error"]

    def test_co_treewidth(self, capsys, tmp_path):
        edgeless = tmp_path / "d5.json"
        edgeless.write_text(json.dumps(Graph(5).to_json()))
        code, out = invoke(capsys, "co-treewidth", "-g", str(edgeless))
        assert code == 0
        assert json.loads(out) == {"coTreewidth": 4}

    def test_layered_width(self, capsys, fixtures_dir):
        code, out = invoke(
            capsys,
            "layered-width",
            "-g",
            fx(fixtures_dir, "p3.json"),
            "-l",
            fx(fixtures_dir, "p3_layering.json"),
            "-d",
            fx(fixtures_dir, "p3.dec.json"),
        )
        assert code == 0
        assert json.loads(out) == {"layeredWidth": 1}

    def test_layered_width_exact(self, capsys, fixtures_dir):
        code, out = invoke(
            capsys, "layered-width", "-g", fx(fixtures_dir, "p3.json"), "--exact"
        )
        assert code == 0
        assert json.loads(out) == {"layeredTreewidth": 1}

    def test_h_width(self, capsys, fixtures_dir):
        code, out = invoke(
            capsys,
            "h-width",
            "-d",
            fx(fixtures_dir, "bowtie.dec.json"),
            "--property",
            "bipartite",
        )
        assert code == 0
        assert json.loads(out) == {"hWidth": 3}

    def test_solver_flags_accepted_without_changing_values(self, capsys, fixtures_dir):
        base = invoke(
            capsys, "solve", "-d", fx(fixtures_dir, "bowtie.dec.json"), "--property", "paths"
        )
        threaded = invoke(
            capsys,
            "solve",
            "-d",
            fx(fixtures_dir, "bowtie.dec.json"),
            "--property",
            "paths",
            "--threads",
            "3",
        )
        assert base == threaded
        code, out = invoke(
            capsys,
            "solve",
            "-d",
            fx(fixtures_dir, "bowtie.dec.json"),
            "--property",
            "paths",
            "--prune",
        )
        assert code == 0
        # the pruning heuristic keeps one entry per interface trace and loses
        # the 4-edge optimum here; it must stay sound (never overshoot)
        assert json.loads(out)["value"] == 3


class TestErrorHandling:
    def test_malformed_json_exits_two_with_position(self, capsys, tmp_path):
        broken = tmp_path / "broken.json"
        broken.write_text('{"vertices": 3, "edges": [[0, 1]')
        code, out = invoke(capsys, "treewidth", "-g", str(broken))
        assert code == 2
        message = json.loads(out)["error"]
        assert "line 1" in message and "column" in message

    def test_too_large_exits_three(self, capsys, tmp_path):
        big = tmp_path / "big.json"
        big.write_text(json.dumps(Graph(13).to_json()))
        code, out = invoke(capsys, "treewidth", "-g", str(big))
        assert code == 3

    def test_unknown_flag_rejected(self, fixtures_dir):
        with pytest.raises(SystemExit) as excinfo:
            run(["treewidth", "-g", fx(fixtures_dir, "k5.json"), "--bogus"])
        assert excinfo.value.code == 2

    def test_missing_file_exits_two(self, capsys):
        code, out = invoke(capsys, "treewidth", "-g", "no-such-file.json")
        assert code == 2


class TestDeterminismAndRoundTrip:
    def test_identical_bytes_across_runs(self, capsys, fixtures_dir):
        outputs = []
        for _ in range(2):
            code, out = invoke(
                capsys,
                "solve",
                "--property",
                "planar",
                "-g",
                fx(fixtures_dir, "bowtie.json"),
                "-d",
                fx(fixtures_dir, "bowtie.dec.json"),
            )
            assert code == 0
            outputs.append(out)
        assert outputs[0] == outputs[1]
        for verb, flag, name in (
            ("colim", "-d", "five_bag_tree.dec.json"),
            ("treewidth", "-g", "k5.json"),
        ):
            first = invoke(capsys, verb, flag, fx(fixtures_dir, name))
            second = invoke(capsys, verb, flag, fx(fixtures_dir, name))
            assert first == second

    def test_outputs_reparse_under_module_schemas(self, capsys, tmp_path, fixtures_dir):
        code, out = invoke(capsys, "colim", "-d", fx(fixtures_dir, "bowtie.dec.json"))
        payload = json.loads(out)
        Graph.from_json(payload["object"])
        sub = Graph(5, [(0, 1)])
        sub_file = tmp_path / "sub.json"
        sub_file.write_text(json.dumps(sub.to_json()))
        code, out = invoke(
            capsys, "restrict", "-d", fx(fixtures_dir, "bowtie.dec.json"), "-g", str(sub_file)
        )
        assert code == 0
        decomposition_from_json(json.loads(out))

    def test_output_file_flag(self, capsys, tmp_path, fixtures_dir):
        target = tmp_path / "out.json"
        code, out = invoke(
            capsys, "treewidth", "-g", fx(fixtures_dir, "k5.json"), "-o", str(target)
        )
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text()) == {"treewidth": 4}


class TestBench:
    def test_empty_config_yields_header_only(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"instances": [], "predicates": ["paths"]}))
        code, out = invoke(capsys, "bench", "--config", str(cfg))
        assert code == 0
        assert out == "instance,vertices,edges,width,predicate,value,pairCompositions,ms\n"

    def test_bowtie_row(self, capsys, tmp_path, fixtures_dir):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "instances": [
                        {"id": "bowtie", "decomposition": fx(fixtures_dir, "bowtie.dec.json")}
                    ],
                    "predicates": ["paths"],
                }
            )
        )
        code, out = invoke(capsys, "bench", "--config", str(cfg))
        assert code == 0
        lines = out.strip().split("\n")
        assert len(lines) == 2
        fields = lines[1].split(",")
        assert fields[:7] == ["bowtie", "5", "6", "2", "paths", "4", "289"]

    def test_generated_suite_pair_counts_match_recomputation(self, capsys):
        from sdkit import MAX_EDGES, predicate_by_name, solve_on_decomposition
        from sdkit.cli import _random_instance
        import random

        code, out = invoke(capsys, "bench", "--generate", "5", "--seed", "0")
        assert code == 0
        lines = out.strip().split("\n")[1:]
        assert len(lines) == 5
        rng = random.Random(0)
        for line in lines:
            fields = line.split(",")
            name, d = _random_instance(rng, int(fields[0][3:]))
            assert name == fields[0]
            result = solve_on_decomposition(d, predicate_by_name(fields[4]), MAX_EDGES)
            recomputed = sum(l * r for l, r in result.stats.compositions)
            assert recomputed == result.stats.pair_compositions == int(fields[6])
            assert str(result.value) == fields[5]

    def test_same_seed_same_instances(self, capsys):
        first = invoke(capsys, "bench", "--generate", "3", "--seed", "7")[1]
        second = invoke(capsys, "bench", "--generate", "3", "--seed", "7")[1]
        strip_ms = lambda text: [line.rsplit(",", 1)[0] for line in text.strip().split("\n")]
        assert strip_ms(first) == strip_ms(second)


def test_console_entry_point(fixtures_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "sdkit.cli", "treewidth", "-g", fx(fixtures_dir, "k5.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"treewidth": 4}
