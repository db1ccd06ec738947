import json
import subprocess
import sys

import pytest

from slidesum import cli
from slidesum.bounds import sliding_bound_general
from slidesum.families import legendre_family
from slidesum.harness import (
    BOUND_FIELDS, ConfigError, FamilySpec, Report, ScanConfig, crossover_table, emit,
    gap_for_shape, interval_starts, parse_region, records_from_csv, records_to_csv, run_scan,
    summarize, verify_region,
)
from slidesum.regions import GapSpec, IntervalZm, enumerate_gap, sum_region
from slidesum.ring import field_context

SMALL = dict(primes=(101, 211), families=("legendre", "kloosterman", "korobov:h=1"))


@pytest.fixture(scope="module")
def small_report():
    return run_scan(ScanConfig(**SMALL))


class TestConfig:
    def test_defaults_from_bundled_file(self):
        cfg = ScanConfig.default()
        assert cfg.primes == (101, 211, 499, 1009, 2003, 10007)
        assert cfg.multipliers == (1.5, 2, 4, 8, 16)
        assert len(cfg.families) >= 4 and cfg.eps == 0.1 and cfg.starts == 5

    def test_parse_text(self):
        cfg = ScanConfig.from_text("""
            # comment
            primes = range:90-110
            families = kloosterman; mixed:order=2,f=X^2+1,g=X^3
            gap-shapes = 2:4, 3:8
            eps = 0.05
        """)
        assert cfg.primes == (97, 101, 103, 107, 109)
        assert cfg.families[1] == "mixed:order=2,f=X^2+1,g=X^3"
        assert cfg.gap_shapes == ((2, 4.0), (3, 8.0)) and cfg.eps == 0.05

    @pytest.mark.parametrize("text", [
        "primes = 100", "eps = 0.5", "colour = red", "families = bogus",
        "families = mixed:f=X+Y", "format = xml", "bounds = nonsense", "starts = 0",
        "primes = range:a-b", "gap_shapes = x:y", "multipliers = a",
    ])
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            ScanConfig.from_text(text)

    def test_family_spec(self):
        spec = FamilySpec.parse("sympower:d=3,c=12")
        assert spec.kind == "sympower" and str(spec) == "sympower:d=3,c=12"
        fam = spec.build(field_context(101))
        assert fam.phi.conductor_bound == 12 and fam.trace
        with pytest.raises(ConfigError):
            FamilySpec.parse("kloosterman:d=2")
        with pytest.raises(ConfigError):
            FamilySpec.parse("quadphase:h")

    def test_trace_eligibility(self):
        ctx = field_context(101)
        assert FamilySpec.parse("mixed:order=2,f=X,g=0").build(ctx).trace
        assert not FamilySpec.parse("mixed:order=2,f=X^2,g=X").build(ctx).trace
        assert not FamilySpec.parse("mixed:order=1,index=0,f=1,g=3X").build(ctx).trace
        assert FamilySpec.parse("mixed:order=2,f=X^2,g=X^2").build(ctx).trace
        assert not FamilySpec.parse("residue:f=X^2").build(ctx).trace

    def test_regions(self):
        assert parse_region("interval:3,10", 101) == IntervalZm(101, 3, 10)
        assert parse_region("gap:0;1,10;10,5", 1000) == GapSpec(1000, 0, (1, 10), (10, 5))
        for bad in ("interval:3", "blob:1", "gap:x"):
            with pytest.raises(ConfigError):
                parse_region(bad, 101)

    def test_starts_and_gap_shapes(self):
        a = interval_starts(0, 1009, 1009, 64, 5)
        assert a[0] == (1, False) and all(s for _, s in a[1:])
        assert a == interval_starts(0, 1009, 1009, 64, 5)
        b = interval_starts(1, 1009, 1009, 64, 5)
        assert a[0] == b[0] and a[1:] != b[1:]
        for k, mult in [(1, 4), (2, 4), (3, 8)]:
            B = gap_for_shape(10007, 10007, k, mult)
            assert len(enumerate_gap(B)) == B.size
        assert gap_for_shape(101, 101, 3, 8) is None


class TestScan:
    def test_empty_families(self):
        rep = run_scan(ScanConfig(primes=(101,), families=()))
        assert rep.records == [] and rep.exit_code() == 0

    def test_no_violations_and_summary(self, small_report):
        assert small_report.exit_code() == 0
        assert summarize(small_report.records) == small_report.summary
        names = {r["bound_name"] for r in small_report.records if r["record"] == "bound"}
        assert {"completion", "sliding_general", "trace_b54", "special_mean",
                "mult_b66", "sigma_eighth", "gap_shape"} <= names

    def test_single_cell_matches_modules(self):
        p = 101
        recs = verify_region(FamilySpec.parse("legendre"), p, IntervalZm(p, 0, 15))
        by = {r["bound_name"]: r for r in recs}
        phi = legendre_family(field_context(p))
        I = IntervalZm(p, 0, 15)
        assert by["sliding_general"]["lhs"] == pytest.approx(abs(sum_region(phi, I)), abs=1e-12)
        assert by["sliding_general"]["rhs"] == pytest.approx(sliding_bound_general(phi, I, [0]), rel=1e-11)
        assert list(by["completion"]) == list(BOUND_FIELDS)

    def test_seed_changes_only_sampled_rows(self):
        a = run_scan(ScanConfig(primes=(101,), families=("legendre",), seed=1)).records
        b = run_scan(ScanConfig(primes=(101,), families=("legendre",), seed=2)).records
        fixed = lambda rs: [r for r in rs if not r.get("sampled")]
        assert fixed(a) == fixed(b)
        assert [r for r in a if r.get("sampled")] != [r for r in b if r.get("sampled")]

    def test_determinism_and_workers(self):
        cfg = dict(primes=(101, 211), families=("kloosterman", "quadphase:h=2"))
        a = emit(run_scan(ScanConfig(**cfg)))
        assert a == emit(run_scan(ScanConfig(**cfg)))
        b = run_scan(ScanConfig(**cfg, workers=2))
        assert emit(b.records) == emit(run_scan(ScanConfig(**cfg)).records)

    def test_memory_ceiling_skip(self):
        rep = run_scan(ScanConfig(primes=(1009,), families=("legendre",), max_p=500))
        assert rep.skipped and rep.exit_code() == 0 and rep.exit_code(strict=True) == 3

    def test_violation_exit_code(self, small_report):
        recs = [dict(r) for r in small_report.records]
        first = next(r for r in recs if r["record"] == "bound" and r["fatal"])
        first["pass"] = False
        rep = Report("x", {}, recs)
        assert rep.exit_code() == 1 and rep.summary["fatal_failures"]

    def test_bound_filter(self):
        rep = run_scan(ScanConfig(primes=(101,), families=("kloosterman",), bounds=("trace_b54",)))
        assert {r["bound_name"] for r in rep.records if r["record"] == "bound"} == {"trace_b54"}

    def test_crossover_table(self, small_report):
        rows = crossover_table(small_report.records, 211)
        assert rows and all(r["completion"] is not None and r["p"] == 211 for r in rows)


class TestEmit:
    def test_json_csv_json_lossless(self, small_report):
        bounds = [r for r in small_report.records if r["record"] == "bound"]
        back = records_from_csv(emit(bounds, "csv").decode("utf-8"))
        assert back == json.loads(emit(bounds, "json"))

    def test_encoding_and_line_endings(self, small_report):
        for fmt in ("json", "csv"):
            data = emit(small_report, fmt)
            data.decode("utf-8")
            assert b"\r" not in data and data.endswith(b"\n")
        assert emit(small_report, "csv").startswith(b"record,")
        bounds = [r for r in small_report.records if r["record"] == "bound"]
        head = emit(bounds, "csv").split(b"\n", 1)[0].decode()
        assert head == ",".join(BOUND_FIELDS)

    def test_twelve_digits(self, small_report):
        for r in small_report.records:
            for v in r.values():
                if isinstance(v, float) and v == v and abs(v) != float("inf"):
                    assert float(f"{v:.12g}") == v

    def test_columns(self, small_report):
        text = emit(small_report, "csv", columns=["lhs", "rhs"]).decode()
        lines = text.splitlines()
        assert lines[0] == "lhs,rhs" and all(len(x.split(",")) == 2 for x in lines)

    def test_unknown_format(self, small_report):
        with pytest.raises(ConfigError):
            emit(small_report, "xml")

    def test_csv_header_union(self):
        text = records_to_csv([{"a": 1}, {"b": 2.5, "a": None}])
        assert text == "a,b\n1,\n,2.5\n"


class TestCLI:
    def run(self, capsysbinary, *argv):
        code = cli.main(list(argv))
        out = capsysbinary.readouterr()
        return code, out.out.decode(), out.err.decode()

    def test_sum(self, capsysbinary):
        code, out, _ = self.run(capsysbinary, "sum", "--p", "7", "--family", "legendre",
                                "--region", "interval:1,3")
        assert code == 0 and json.loads(out)["re"] == 1.0

    def test_corr_csv(self, capsysbinary):
        code, out, _ = self.run(capsysbinary, "corr", "--p", "11", "--family", "legendre",
                                "--c", "1", "--format", "csv")
        lines = out.splitlines()
        assert lines[0] == "a,re,im,abs,threshold" and lines[1].startswith("0,10,0,10,")
        assert lines[2].startswith("1,-1,0,1,")

    def test_hcheck(self, capsysbinary):
        code, out, _ = self.run(capsysbinary, "hcheck", "--p", "101", "--family", "legendre", "--c", "1")
        rec = json.loads(out)
        assert code == 0 and rec["verdict"] and rec["D"] == [0]

    def test_sigma(self, capsysbinary):
        code, out, _ = self.run(capsysbinary, "sigma", "--p", "101", "--family", "quadphase:h=1",
                                "--region", "interval:5,20")
        assert json.loads(out)["sigma"] == 2020

    def test_verify_jsonl(self, capsysbinary):
        code, out, _ = self.run(capsysbinary, "verify", "--p", "1009", "--family", "kloosterman",
                                "--region", "interval:7,100")
        recs = [json.loads(x) for x in out.splitlines()]
        assert code == 0 and all(r["pass"] for r in recs if r["fatal"])
        assert {"bound_name", "paper_eq", "p", "region", "c", "eps", "lhs", "rhs", "ratio",
                "pass"} <= set(recs[0])

    def test_verify_gap_and_subset(self, capsysbinary, tmp_path):
        code, out, _ = self.run(capsysbinary, "verify", "--p", "1009", "--family", "legendre",
                                "--region", "gap:3;1,6;7,6")
        assert code == 0 and json.loads(out)["bound_name"] == "gap_shape"
        f = tmp_path / "s.txt"
        f.write_text("1 2 3, 5\n")
        code, out, _ = self.run(capsysbinary, "sum", "--p", "7", "--family", "legendre",
                                "--region", f"subset:@{f}")
        assert code == 0 and json.loads(out)["size"] == 4

    def test_tabulate(self, capsysbinary):
        code, out, _ = self.run(capsysbinary, "tabulate", "--p", "5", "--family", "kloosterman",
                                "--format", "csv")
        assert out.splitlines()[0] == "n,re,im" and len(out.splitlines()) == 6

    def test_equidist(self, capsysbinary):
        code, out, _ = self.run(capsysbinary, "equidist", "--p", "1009", "--family", "kloosterman", "--H", "3")
        lines = out.splitlines()
        assert lines[0] == "p,family,length,multiplier,ks,weyl_h1,weyl_h2,weyl_h3"
        assert len(lines) == 1 + len([b for b in (2, 4, 8, 16, 32) if 32 * b <= 1009])
        code, out, _ = self.run(capsysbinary, "equidist", "--p", "1009", "--family",
                                "fractional:f=X^3", "--H", "2")
        assert code == 0 and out.splitlines()[0].endswith("weyl_h2")

    def test_scan_with_config_and_out(self, capsysbinary, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("primes = 101\nfamilies = kloosterman\n")
        out = tmp_path / "r.json"
        code, _, _ = self.run(capsysbinary, "scan", "--config", str(cfg), "--out", str(out))
        rep = json.loads(out.read_text())
        assert code == 0 and rep["config"]["primes"] == [101] and rep["records"]

    def test_usage_errors(self, capsysbinary):
        assert self.run(capsysbinary, "sum", "--p", "100", "--family", "legendre",
                        "--region", "interval:0,3")[0] == 2
        assert self.run(capsysbinary, "sum", "--p", "7", "--family", "legendre")[0] == 2
        assert self.run(capsysbinary, "scan", "--config", "/nonexistent")[0] == 2
        with pytest.raises(SystemExit) as exc:
            cli.main(["bogus"])
        assert exc.value.code == 2

    def test_strict_skip(self, capsysbinary, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("primes = 101\nfamilies = legendre\nmultipliers = 20\n")
        assert self.run(capsysbinary, "scan", "--config", str(cfg))[0] == 0
        assert self.run(capsysbinary, "scan", "--config", str(cfg), "--strict")[0] == 3

    def test_console_script(self):
        res = subprocess.run([sys.executable, "-m", "slidesum.cli", "sum", "--p", "7", "--family",
                              "legendre", "--region", "interval:1,3", "--format", "csv"],
                             capture_output=True, check=True)
        assert res.stdout.decode().splitlines()[0] == "family,p,m,region,size,re,im,abs"
