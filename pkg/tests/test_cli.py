import io
import json
import subprocess
import sys

import pytest

from spanrun.cli import main
from spanrun.samples import EMAIL_DOCUMENT, EMAIL_EVA, EMAIL_PATTERN
from spanrun.vafile import parse_automaton

SELF_LOOP_VA = """\
va
vars x
states 1
initial 0
final 0
open 0 x 0
"""


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    email = tmp_path / "email.eva"
    email.write_text(EMAIL_EVA)
    doc = tmp_path / "doc.txt"
    doc.write_bytes(EMAIL_DOCUMENT)
    loop = tmp_path / "loop.va"
    loop.write_text(SELF_LOOP_VA)
    bad = tmp_path / "bad.va"
    bad.write_text("va\nstates two\n")
    return {"email": str(email), "doc": str(doc), "loop": str(loop), "bad": str(bad),
            "dir": tmp_path}


class TestCompile:
    def test_small_pattern(self, files):
        target = files["dir"] / "x.va"
        code, _, err = run("compile", "--pattern", "x{a}", "-o", str(target))
        assert code == 0
        a = parse_automaton(target.read_text())
        assert a.state_count <= 6
        assert "states=" in err

    def test_syntax_error(self):
        code, _, err = run("compile", "--pattern", "x{a")
        assert code == 1
        assert "offset" in err

    def test_reemission_is_idempotent(self, files):
        code, first, _ = run("compile", "--va", files["email"])
        assert code == 0
        again = files["dir"] / "again.eva"
        again.write_text(first)
        assert run("compile", "--va", str(again))[1] == first

    def test_missing_file(self, files):
        assert run("compile", "--va", str(files["dir"] / "nope.va"))[0] == 1


class TestCheck:
    def test_email_is_sequential(self, files):
        code, out, _ = run("check", files["email"])
        assert code == 0 and "sequential" in out and "not" not in out

    def test_self_loop_has_witness(self, files):
        code, out, _ = run("check", "--va", files["loop"])
        assert code == 2
        assert "not sequential" in out and "+x" in out

    def test_malformed(self, files):
        assert run("check", files["bad"])[0] == 1

    def test_no_input(self):
        assert run("check")[0] == 1


class TestRun:
    def test_email_jsonl(self, files):
        code, out, _ = run("run", "--pattern", EMAIL_PATTERN, files["doc"])
        assert code == 0
        lines = out.splitlines()
        assert lines == ['{"pairs":[["open","x",2],["close","x",5]]}',
                         '{"pairs":[["open","x",6],["close","x",9]]}']

    def test_eva_file_agrees_with_oracle(self, files):
        _, out, _ = run("run", "--va", files["email"], files["doc"])
        _, expected, _ = run("oracle", "--pattern", EMAIL_PATTERN, files["doc"])
        assert sorted(out.splitlines()) == sorted(expected.splitlines())

    def test_limit(self, files):
        code, out, _ = run("run", "--pattern", EMAIL_PATTERN, "--limit", "1", files["doc"])
        assert code == 0 and len(out.splitlines()) == 1

    def test_no_variables(self, files):
        doc = files["dir"] / "aaa.txt"
        doc.write_bytes(b"aaa")
        assert run("run", "--pattern", "a*", str(doc))[1] == '{"pairs":[]}\n'

    def test_tsv(self, files):
        out = run("run", "--pattern", EMAIL_PATTERN, "--format", "tsv", files["doc"])[1]
        assert out.splitlines() == ["x=2..5", "x=6..9"]

    def test_stats(self, files):
        out = run("run", "--pattern", EMAIL_PATTERN, "--stats", files["doc"])[1]
        stats = json.loads(out.splitlines()[-1])["stats"]
        assert stats["outputs"] == 2
        assert stats["preprocessing_steps"] > 0 and stats["max_delay_steps"] > 0

    @pytest.mark.parametrize("mode", ["auto", "general", "extended"])
    def test_modes_agree(self, files, mode):
        out = run("run", "--pattern", "(a|b)*x{a}y{b*}.*", "--mode", mode, files["doc"])[1]
        base = run("oracle", "--pattern", "(a|b)*x{a}y{b*}.*", files["doc"])[1]
        assert sorted(out.splitlines()) == sorted(base.splitlines())

    def test_not_sequential(self, files):
        doc = files["dir"] / "empty.txt"
        doc.write_bytes(b"")
        code, _, err = run("run", "--va", files["loop"], str(doc))
        assert code == 2 and "--sequentialize" in err
        code, out, _ = run("run", "--va", files["loop"], "--sequentialize", str(doc))
        assert code == 0 and out == '{"pairs":[]}\n'

    def test_missing_document(self, files):
        assert run("run", "--pattern", "x{a}", str(files["dir"] / "missing"))[0] == 1

    def test_bad_flag(self):
        assert run("run", "--nope")[0] == 1

    def test_stdin(self, files):
        proc = subprocess.run([sys.executable, "-m", "spanrun", "run", "--pattern", EMAIL_PATTERN, "-"],
                              input=EMAIL_DOCUMENT, capture_output=True, check=True)
        assert len(proc.stdout.splitlines()) == 2


class TestBench:
    def test_email_records(self):
        code, out, _ = run("bench", "--sizes", "2000,1000")
        assert code == 0
        records = json.loads(out)["records"]
        assert [r["n"] for r in records] == [1000, 2000]
        for r in records:
            assert all(v >= 0 for v in r.values())
            assert r["outputs"] > 0

    def test_uniform_has_no_matches(self):
        code, out, _ = run("bench", "--sizes", "5000", "--generator", "uniform",
                           "--pattern", "(.* )?x{[^@ ]+@[^@ ]+}( .*)?")
        records = json.loads(out)["records"]
        assert code == 0 and records[0]["outputs"] == 0
        assert records[0]["preprocessing_steps"] > 0

    def test_bad_parameters(self):
        assert run("bench", "--sizes", "ten")[0] == 1
        assert run("bench", "--sizes", "100", "--generator", "nope")[0] == 1
