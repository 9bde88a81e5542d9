import io
import os

import pytest

from parserepair.cli import main


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def test_check():
    code, text = run(["check", "-g", "dyck", "(", ")"])
    assert code == 0 and text == "valid\n"
    code, text = run(["check", "-g", "dyck", "(", "("])
    assert code == 1 and text == "invalid\n"


def test_check_unknown_token_is_usage_error():
    code, _ = run(["check", "-g", "dyck", "zzz"])
    assert code == 2


def test_repair_output_format():
    code, text = run(["repair", "-g", "dyck", "--auto", "(", ")", "("])
    assert code == 0
    lines = text.splitlines()
    assert lines[-1] == "exhausted\ttrue"
    ranked = [line.split("\t") for line in lines[:-1]]
    assert [r[0] for r in ranked] == [str(i) for i in range(1, len(ranked) + 1)]
    words = {r[3] for r in ranked}
    assert words == {"( )", "( ) ( )"}
    assert all(r[2] == "1" for r in ranked)
    float(ranked[0][1])  # score column parses


def test_repair_byte_stable():
    argv = ["repair", "-g", "dyck", "--max-dist", "2", "--top-k", "5", "(", "("]
    assert run(argv) == run(argv)


def test_repair_radius_exhausted_exit():
    code, _ = run(["repair", "-g", "dyck", "--max-dist", "1", "(", "(", "("])
    assert code == 3
    code, _ = run(["repair", "-g", "dyck", "--auto", "--radius-limit", "1", "(", "(", "("])
    assert code == 3


def test_repair_budget_exit():
    code, text = run(
        ["repair", "-g", "dyck", "--max-dist", "2", "--budget-ms", "0", "(", "("]
    )
    assert code == 4
    assert text.splitlines()[-1] == "exhausted\tfalse"


def test_budget_env_default(monkeypatch):
    monkeypatch.setenv("PARSEREPAIR_BUDGET_MS", "0")
    code, text = run(["repair", "-g", "dyck", "--max-dist", "1", "(", "("])
    assert code == 4 and text.splitlines()[-1] == "exhausted\tfalse"


def test_complete():
    code, text = run(["complete", "-g", "arith", "1", "_", "_"])
    assert code == 0
    assert text.splitlines() == ["1 + 0", "1 + 1", "1 × 0", "1 × 1"]


def test_count_and_led():
    code, text = run(["count", "-g", "dyck", "--max-dist", "1", "(", "(", ")"])
    assert (code, text) == (0, "3\n")
    code, text = run(["led", "-g", "dyck", "(", ")", "("])
    assert (code, text) == (0, "1\n")
    code, text = run(["led", "-g", "dyck", "--limit", "1", "(", "(", "("])
    assert (code, text) == (0, "none\n")


def test_enumerate():
    code, text = run(["enumerate", "-g", "dyck", "--max-dist", "1", "(", ")", "("])
    assert code == 0
    assert text.splitlines() == ["( )", "( ) ( )"]
    # empty intersection prints nothing but succeeds
    code, text = run(["enumerate", "-g", "dyck", "--max-dist", "1", "(", "(", "("])
    assert (code, text) == (0, "")


def test_usage_errors():
    code, _ = run(["count", "-g", "no-such-grammar", "--max-dist", "1", "a"])
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        run(["no-such-command"])
    assert exc.value.code == 2


def test_train_ngram_then_repair(tmp_path):
    corpus = tmp_path / "corpus.txt"
    corpus.write_text("( ( ) )\n( ( ) )\n( ( ) )\n")
    model = tmp_path / "model.ngram"
    code, text = run(
        ["train-ngram", "--corpus", str(corpus), "--order", "2", "--out", str(model)]
    )
    assert code == 0 and "wrote" in text
    assert model.exists()
    # among the two length-4 repairs of ( ( the corpus picks the nested one
    argv = ["repair", "-g", "dyck", "--max-dist", "2", "(", "("]
    code, text = run(argv + ["--ngram", str(model)])
    assert code == 0
    words = [line.split("\t")[3] for line in text.splitlines()[:-1]]
    assert words.index("( ( ) )") < words.index("( ) ( )")


def test_eval_writes_report(tmp_path):
    dataset = tmp_path / "data.tsv"
    dataset.write_text("( ) (\t( )\n( (\t( )\n( )\t( )\n")
    out_dir = tmp_path / "report"
    code, text = run(
        ["eval", "-g", "dyck", "--dataset", str(dataset), "--auto", "--out-dir", str(out_dir)]
    )
    assert code == 0
    assert text.startswith("bin\tn\tP@1\tP@5\tP@10")
    assert "overall\t3\t" in text
    assert (out_dir / "report.tsv").read_text() == text
    for name in ("precision_by_distance.png", "outcomes.png"):
        p = out_dir / name
        assert p.exists() and p.stat().st_size > 0
        assert p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
