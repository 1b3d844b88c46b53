import json
import random
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from rotgroup.certify import Certificate, verify_certificate
from rotgroup.cli import main
from rotgroup.words import Gm41, Gpq, evaluate, parse_word, random_word


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def schema(name):
    return json.loads(resources.files("rotgroup").joinpath("schemas", f"{name}.json").read_text())


# ------------------------------------------------------------------ golden outputs


def test_golden_normalize(capsys):
    assert run(capsys, "normalize", "--family", "gpq", "--p", "4", "--q", "3", "A^2 B A^2 B")[1].splitlines()[0] == "ε"
    assert run(capsys, "normalize", "--family", "gm41", "--m", "12", "")[1].splitlines() == ["ε", "length=0"]
    code, out, _ = run(capsys, "normalize", "--family", "gpq", "--p", "3", "--q", "3", "A^4")
    assert code == 0 and out.splitlines() == ["A^1", "length=1"]


def test_golden_closure_count(capsys):
    assert run(capsys, "closure", "--family", "gpq", "--p", "4", "--q", "4", "--cap", "100") == (0, "order=24\n", "")
    assert run(capsys, "count", "--p", "4", "--q", "3", "--n", "2") == (0, "24\n", "")


def test_golden_certify_pinwheel(capsys):
    code, out, _ = run(capsys, "certify", "--family", "gnu41", "S T^1 S T^-2")
    assert code == 0
    assert out == (
        "certificate v1\n"
        "kind ModFive\n"
        "verdict nonidentity\n"
        "conductor 5\n"
        "s_head 0\n"
        "exponents 1 -2\n"
        "s_tail 0\n"
        "mod5 0 3 1 ; 0 4 3 ; 0 0 0\n"
    )
    assert verify_certificate(Certificate.from_text(out))


def test_output_is_byte_stable(capsys):
    argv = ["ball", "--family", "gpq", "--p", "4", "--q", "3", "--n", "2", "--list", "--format", "json"]
    first = run(capsys, *argv)[1]
    assert run(capsys, *argv)[1] == first


# ------------------------------------------------------------------ exit codes


def test_eq_exit_codes(capsys):
    base = ["eq", "--family", "gpq", "--p", "4", "--q", "3"]
    assert run(capsys, *base, "A^2 B A^2 B", "")[:2] == (0, "true\n")
    assert run(capsys, *base, "A", "B")[:2] == (1, "false\n")
    assert run(capsys, "eq", "--family", "gm41", "--m", "12", "S^2 T^1", "T^-1 S^2")[0] == 0


def test_certify_identity_exit_one(capsys):
    code, out, _ = run(capsys, "certify", "--family", "gpq", "--p", "4", "--q", "3", "A^2 B A^2 B")
    assert code == 1 and "verdict identity" in out
    assert run(capsys, "certify", "--family", "gtrans", "")[0] == 1
    assert run(capsys, "certify", "--family", "gtrans", "X V")[0] == 0


def test_closure_past_cap_exit_one(capsys):
    code, out, _ = run(capsys, "closure", "--family", "gpq", "--p", "3", "--q", "5", "--cap", "200")
    assert code == 1 and out.startswith("exceeds cap")


@pytest.mark.parametrize(
    "argv,needle",
    [
        (["normalize", "--family", "gpq", "--p", "4", "--q", "3", "Q^2"], "unknown generator"),
        (["normalize", "--family", "gpq", "--p", "4", "--q", "3", "A^"], "offset 1"),
        (["normalize", "--family", "gpq", "--p", "4"], "--q"),
        (["normalize", "--family", "gm41", "S"], "--m"),
        (["normalize", "--family", "gpq", "--p", "2", "--q", "3", "A"], "p, q >= 3"),
        (["count", "--p", "4", "--q", "4", "--n", "2"], "not divisible by 4"),
        (["ball", "--family", "gpq", "--p", "4", "--q", "3", "--n", "7"], "guard rail"),
        (["eq", "--family", "gtrans", "X", "X"], "certify"),
        (["orbit", "no_such_table"], "no table"),
        (["eq", "--family", "gpq", "--p", "4", "--q", "3", "A"], "expected 2"),
    ],
)
def test_usage_errors(capsys, argv, needle):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert needle in err


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["normalize", "--family", "nope"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_regime_error_names_case(capsys):
    code, _, err = run(capsys, "normalize", "--family", "gpq", "--p", "2", "--q", "5", "A")
    assert code == 2 and "finite" in err


# ------------------------------------------------------------------ JSON schemas


JSON_CASES = [
    ("normalize", ["--family", "gpq", "--p", "4", "--q", "3", "--matrix", "A B^2 A^3"]),
    ("normalize", ["--family", "gpq", "--p", "6", "--q", "4", "A B"]),
    ("normalize", ["--family", "gpq", "--p", "3", "--q", "5", "A B"]),
    ("normalize", ["--family", "gm41", "--m", "8", "S T^1 U"]),
    ("normalize", ["--family", "gpq", "--p", "4", "--q", "8", "A B"]),
    ("eq", ["--family", "gpq", "--p", "4", "--q", "3", "A", "A^5"]),
    ("eval", ["--family", "gnu41", "S T"]),
    ("eval", ["--family", "gtrans", "X V^-1"]),
    ("eval", ["--family", "gpq", "--p", "4", "--q", "3", "A B"]),
    ("certify", ["--family", "gm41", "--m", "12", "S T^1"]),
    ("certify", ["--family", "gnufree", "T V^-2"]),
    ("certify", ["--family", "gtrans", "X V"]),
    ("ball", ["--family", "gpq", "--p", "3", "--q", "3", "--n", "2", "--check-injective", "--list"]),
    ("closure", ["--family", "gpq", "--p", "4", "--q", "4"]),
    ("closure", ["--family", "gpq", "--p", "3", "--q", "5", "--cap", "50"]),
    ("count", ["--p", "6", "--q", "5", "--n", "2"]),
    ("orbit", ["dite_kart", "--n", "2", "--cap", "100"]),
]


@pytest.mark.parametrize("cmd,args", JSON_CASES)
def test_json_validates(capsys, cmd, args):
    code, out, _ = run(capsys, cmd, *args, "--format", "json")
    assert code in (0, 1)
    data = json.loads(out)
    jsonschema.validate(data, schema(cmd))
    assert data["command"] == cmd


# ------------------------------------------------------------------ round trips


@pytest.mark.parametrize(
    "spec,argv",
    [
        (Gpq(4, 3), ["--family", "gpq", "--p", "4", "--q", "3"]),
        (Gpq(6, 4), ["--family", "gpq", "--p", "6", "--q", "4"]),
        (Gpq(3, 5), ["--family", "gpq", "--p", "3", "--q", "5"]),
        (Gm41(12), ["--family", "gm41", "--m", "12"]),
    ],
    ids=str,
)
def test_printed_forms_reparse(capsys, spec, argv):
    for seed in range(15):
        code, out, _ = run(capsys, "normalize", *argv, "--random", "6", "--seed", str(seed), "--format", "json")
        data = json.loads(out)
        printed = parse_word(data["form"], spec)
        # the random word is reproducible from the seed
        w = random_word(spec, 6, random.Random(seed))
        assert evaluate(printed) == evaluate(w)


def test_gm41_target_group_reported(capsys):
    code, out, _ = run(capsys, "normalize", "--family", "gpq", "--p", "4", "--q", "8", "A B")
    lines = out.splitlines()
    assert lines[-1].startswith("group=G(8,4,1)")
    w = parse_word(lines[0], Gm41(8))
    assert evaluate(w) == evaluate(parse_word("A B", Gpq(4, 8)))


def test_orbit_from_file(tmp_path, capsys):
    f = tmp_path / "t.txt"
    f.write_text("group gpq 4 3\nseed t\nt t A\nt t B\n")
    code, out, _ = run(capsys, "orbit", str(f), "--n", "2")
    assert code == 0 and "distinct=2 4" in out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "rotgroup", "count", "--p", "4", "--q", "3", "--n", "1"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "12\n"
