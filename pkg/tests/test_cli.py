import random

import pytest

from tausync.cli import main
from tausync.oracle import TextIndex, verify_sync


@pytest.fixture
def text_file(tmp_path):
    rng = random.Random(9)
    symbols = bytes(rng.randrange(4) for _ in range(160))
    path = tmp_path / "text.bin"
    path.write_bytes(symbols)
    return str(path), list(symbols)


def test_sync_list_verified(tmp_path, text_file, capsys):
    path, symbols = text_file
    out = tmp_path / "sync.txt"
    rc = main(["sync", path, "--sigma", "4", "--tau", "8", "--format", "list",
               "--verify", "--out", str(out)])
    assert rc == 0
    members = [int(line) for line in out.read_text().split()]
    assert members == sorted(members)
    assert verify_sync(symbols, 8, members, TextIndex(symbols)).ok


def test_sync_sparse_support_roundtrip(tmp_path, text_file, capsys):
    path, symbols = text_file
    cont = tmp_path / "sync.bin"
    assert main(["sync", path, "--sigma", "4", "--tau", "8",
                 "--format", "sparse", "--support", "--out", str(cont)]) == 0
    listed = tmp_path / "sync.txt"
    assert main(["sync", path, "--sigma", "4", "--tau", "8",
                 "--format", "list", "--out", str(listed)]) == 0
    first = int(listed.read_text().split()[0])
    assert main(["query", str(cont), "--select", "1"]) == 0
    assert capsys.readouterr().out.strip() == str(first)
    assert main(["verify", path, "--sigma", "4", "--tau", "8",
                 "--set", str(cont)]) == 0


def test_sync_bad_tau_usage_error(text_file):
    path, symbols = text_file
    assert main(["sync", path, "--sigma", "4", "--tau", "999"]) == 2
    assert main(["sync", path, "--sigma", "4", "--tau", "0"]) == 2


def test_missing_file_io_error(tmp_path):
    assert main(["sync", str(tmp_path / "absent.bin"), "--tau", "2"]) == 3


def test_encode_decode_byte_identity(tmp_path, capsys):
    arr = tmp_path / "arr.txt"
    arr.write_text("0 0 0 3 0 0 5 0 0 0 0 0 0 0 9 1 0 0\n")
    cont = tmp_path / "arr.bin"
    assert main(["encode", str(arr), "--out", str(cont)]) == 0
    first = cont.read_bytes()
    decoded = tmp_path / "back.txt"
    assert main(["decode", str(cont), "--out", str(decoded)]) == 0
    assert decoded.read_text().split() == arr.read_text().split()
    again = tmp_path / "arr2.bin"
    assert main(["encode", str(decoded), "--out", str(again)]) == 0
    assert again.read_bytes() == first


def test_verify_corrupted_container(tmp_path, text_file):
    path, _ = text_file
    cont = tmp_path / "sync.bin"
    assert main(["sync", path, "--sigma", "4", "--tau", "8",
                 "--format", "sparse", "--out", str(cont)]) == 0
    data = bytearray(cont.read_bytes())
    data[25] ^= 0xFF
    bad = tmp_path / "bad.bin"
    bad.write_bytes(bytes(data))
    assert main(["verify", path, "--sigma", "4", "--tau", "8",
                 "--set", str(bad)]) == 1


def test_bench_header_stable(tmp_path, text_file, capsys):
    path, _ = text_file
    assert main(["bench", path, "--sigma", "4", "--tau-list", "4,8"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "n,sigma,tau,repr,bits,build_ns,query_ns"
    assert main(["bench", path, "--sigma", "4", "--tau-list", "8,4"]) == 0
    assert capsys.readouterr().out.strip().splitlines()[0] == lines[0]


def test_recompress_and_runs_commands(tmp_path, text_file, capsys):
    path, symbols = text_file
    assert main(["recompress", path, "--sigma", "4", "--level", "2",
                 "--format", "list"]) == 0
    listed = [int(x) for x in capsys.readouterr().out.split()]
    from tausync.text import PackedText
    from tausync.recompress import RecompressionIndex
    assert listed == RecompressionIndex(PackedText(symbols, 4)).level_list(2)
    assert main(["runs", path, "--sigma", "4", "--ell", "6", "--period", "3",
                 "--format", "list"]) == 0
    out = capsys.readouterr().out
    for line in out.split("\n"):
        if line:
            b, e, p = map(int, line.split())
            assert e - b >= 6 and p <= 3


def test_transduce_demo(tmp_path, capsys):
    arr = tmp_path / "arr.txt"
    arr.write_text("2 0 1\n")
    assert main(["transduce", str(arr), "--program", "decrement"]) == 0
    assert capsys.readouterr().out.split() == ["1", "0", "0"]
    assert main(["transduce", str(arr), "--program", "threshold",
                 "--threshold", "2"]) == 0
    assert capsys.readouterr().out.split() == ["1", "0", "0"]


def test_decimal_input(tmp_path, capsys):
    dec = tmp_path / "text.txt"
    dec.write_text("".join(f"{i} {v}\n" for i, v in
                           enumerate([0, 1, 0, 1, 0, 1, 0, 1])))
    assert main(["sync", str(dec), "--decimal", "--tau", "2",
                 "--format", "list"]) == 0
    members = [int(x) for x in capsys.readouterr().out.split()]
    assert members == sorted(set(members))
