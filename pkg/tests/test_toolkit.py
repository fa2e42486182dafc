"""
Tests for the EssGapToolkit controller.
"""

import json
from unittest.mock import MagicMock, patch

import pytest
from pydantic import BaseModel

from essgap import __version__
from essgap.tools.commands import ComputeResult, GenResult
from essgap.tools.implicants import read_dimacs
from essgap.tools.reports import CSV_COLUMNS, GapReport, SuiteResult
from essgap.toolkit import EssGapToolkit, serialize_tool_output
from essgap.utils.config import OutputFormat, ToolkitConfig
from essgap.utils.errors import CapExceededError, EssGapError, FormatError


@pytest.fixture
def no_suite_config(tmp_path):
    return {"suite_config_path": str(tmp_path / "absent.yaml")}


class TestDispatch:
    """Test cases for EssGapToolkit.call."""

    def setup_method(self):
        self.toolkit = EssGapToolkit()

    def test_names(self):
        """Test the registered gen names."""
        assert self.toolkit.names("gen") == [
            "all-k-subsets",
            "all-pairs",
            "gimpel",
            "gimpel-general",
            "horn-gap",
            "lift",
        ]
        assert "ess-dual" in self.toolkit.names("compute")
        assert "bounds-corpus" in self.toolkit.names("verify")
        assert self.toolkit.names("publish") == []

    def test_gen_all_pairs(self):
        """Test a gen call."""
        result = self.toolkit.call("gen", "all-pairs", {"m": 3})
        assert isinstance(result, GenResult)
        assert result.artifacts == {"allpairs_m3.txt": "3 3\n1 2\n1 3\n2 3\n"}
        assert result.summary == {"m": 3, "p": 3, "r": 2}

    def test_unset_arguments_are_dropped(self):
        """Test that None arguments fall back to defaults."""
        result = self.toolkit.call("gen", "all-k-subsets", {"m": 4, "r": None})
        assert result.params == {"m": 4, "r": 2}

    def test_unknown_command(self):
        """Test an unknown command."""
        with pytest.raises(EssGapError) as excinfo:
            self.toolkit.call("publish", "all-pairs")
        assert "gen, compute, verify" in excinfo.value.hint

    def test_unknown_target(self):
        """Test an unknown target."""
        with pytest.raises(EssGapError, match="Unknown gen target 'cube'"):
            self.toolkit.call("gen", "cube", {})

    def test_invalid_arguments(self):
        """Test argument validation."""
        with pytest.raises(EssGapError, match="Invalid arguments"):
            self.toolkit.call("gen", "all-pairs", {"m": 1})
        with pytest.raises(EssGapError, match="Invalid arguments"):
            self.toolkit.call("compute", "cs", {})

    def test_dispatches_with_config_and_params(self):
        """Test that implementations receive config and params."""
        class EchoParams(BaseModel):
            value: int = 1

        impl = MagicMock(return_value="done")
        definitions = {
            "gen": {"echo": (impl, EchoParams, str, "Echo")},
            "compute": {},
            "verify": {},
        }
        with patch("essgap.toolkit.get_tool_definitions", return_value=definitions):
            toolkit = EssGapToolkit()
        assert toolkit.call("gen", "echo", {"value": 5}) == "done"
        config, params = impl.call_args[0]
        assert config is toolkit.config
        assert params.value == 5


class TestGenerators:
    """Test cases for the gen tools."""

    def test_gimpel(self):
        """Test gen gimpel for all pairs."""
        result = EssGapToolkit().call("gen", "gimpel", {"m": 3, "pairs": True, "r": 3})
        data = json.loads(result.artifacts["gimpel_m3_r2.json"])
        assert data == {"n": 3, "ones": [3, 5, 6], "stars": [1, 2, 4, 7]}
        assert result.summary["s"] == 4

    def test_gimpel_from_file(self, tmp_path):
        """Test gen gimpel from a cover file."""
        path = tmp_path / "cover.txt"
        path.write_text("3 2\n1 2\n2 3\n")
        result = EssGapToolkit().call("gen", "gimpel", {"source": str(path)})
        assert "gimpel.json" in result.artifacts
        assert result.summary["p"] == 2

    def test_gimpel_needs_an_instance(self):
        """Test gen gimpel without an instance."""
        with pytest.raises(EssGapError):
            EssGapToolkit().call("gen", "gimpel", {})

    def test_gimpel_general(self):
        """Test the hand V/W artifacts and their m=3 restriction."""
        result = EssGapToolkit().call("gen", "gimpel-general", {"m": 3, "mode": "hand"})
        assert set(result.artifacts) == {
            "gimpel_general_hand_m3_r2.json",
            "gimpel_general_hand_m3_r2.vw.json",
        }
        assert result.n == 6
        with pytest.raises(EssGapError):
            EssGapToolkit().call("gen", "gimpel-general", {"m": 4, "mode": "hand"})

    def test_gimpel_general_random(self):
        """Test the random V/W artifacts."""
        result = EssGapToolkit({"max_n": 24}).call(
            "gen", "gimpel-general", {"m": 3, "mode": "random", "seed": 2}
        )
        assert result.summary["t"] == 20
        vw = json.loads(result.artifacts["gimpel_general_random_m3_r2.vw.json"])
        assert vw["seed"] == 2

    def test_lift(self, write_function):
        """Test gen lift."""
        source = write_function("fhat.json", {"n": 3, "ones": [3, 5, 6], "stars": [1, 2, 4, 7]})
        result = EssGapToolkit().call("gen", "lift", {"source": source})
        assert result.n == 9
        assert len(json.loads(result.artifacts["lift.json"])["ones"]) == 140
        assert json.loads(result.artifacts["lift.params.json"]) == {"t": 4, "s_odd": [1, 2, 4, 7]}

    def test_horn_gap(self):
        """Test gen horn-gap."""
        result = EssGapToolkit().call("gen", "horn-gap", {"k": 3, "t": 2})
        assert result.summary == {"clauses": 15, "witness": 6, "feedback": 3, "amplification": 6}
        cnf = read_dimacs("", text=result.artifacts["horn_gap_k3_t2.cnf"])
        assert len(cnf) == 15
        assert "horn_gap_k3_t2.json" in result.artifacts

    def test_horn_gap_above_cap_writes_only_cnf(self):
        """Test that a wide family skips its table."""
        result = EssGapToolkit({"max_n": 10}).call("gen", "horn-gap", {"k": 5, "t": 1})
        assert set(result.artifacts) == {"horn_gap_k5_t1.cnf", "horn_gap_k5_t1.names.json"}

    def test_cap(self):
        """Test the gen cap."""
        with pytest.raises(CapExceededError):
            EssGapToolkit({"max_n": 2}).call("gen", "gimpel", {"m": 3, "pairs": True})
        forced = EssGapToolkit({"max_n": 2, "force": True})
        result = forced.call("gen", "gimpel", {"m": 3, "pairs": True})
        assert result.n == 3


class TestCompute:
    """Test cases for the compute tools."""

    def setup_method(self):
        self.toolkit = EssGapToolkit()

    def test_cs(self, write_function):
        """Test compute cs."""
        source = write_function("and.json", {"n": 2, "ones": [3]})
        result = self.toolkit.call("compute", "cs", {"source": source})
        assert isinstance(result, ComputeResult)
        assert result.value == 2
        assert json.loads(result.artifacts["cs.json"]) == {"size": 2, "certified": True}
        assert len(read_dimacs("", text=result.artifacts["cs.cnf"])) == 2

    def test_ds_and_ess_dual(self, write_function):
        """Test compute ds and ess-dual."""
        source = write_function("fhat.json", {"n": 3, "ones": [3, 5, 6], "stars": [1, 2, 4, 7]})
        assert self.toolkit.call("compute", "ds", {"source": source}).value == 2
        assert self.toolkit.call("compute", "ess-dual", {"source": source}).value == 1
        assert self.toolkit.call("compute", "ess", {"source": source, "view": "true"}).value == 1

    def test_ess_certificate(self, write_function):
        """Test the ess certificate artifact."""
        source = write_function("and.json", {"n": 2, "ones": [3]})
        result = self.toolkit.call("compute", "ess", {"source": source})
        assert result.certificate == {
            "value": 2,
            "view": "false",
            "k": 2,
            "certificate": [1, 2],
            "witnesses": {"1,2": 3},
            "witnesses_omitted": False,
        }

    def test_ess_follows_k(self, write_function):
        """Test that compute ess honours --k instead of silently using pairs."""
        # parity on 3 variables: 4 falsepoints, pairwise and 3-wise independent
        source = write_function("parity.json", {"n": 3, "ones": [1, 2, 4, 7]})
        pairwise = self.toolkit.call("compute", "ess", {"source": source})
        triple = self.toolkit.call("compute", "ess", {"source": source, "k": 3})
        assert pairwise.certificate["k"] == 2
        assert triple.certificate["k"] == 3
        assert triple.value == 4
        assert len(triple.certificate["witnesses"]) == 4

    def test_ess_k_exceeds_ess_on_and(self, write_function):
        """Test that ess with k=3 differs from k=2 where the function allows it."""
        # x1 AND x2: falsepoints 0, 1, 2 all lie in one of two clauses
        source = write_function("and.json", {"n": 2, "ones": [3]})
        assert self.toolkit.call("compute", "ess", {"source": source}).value == 2
        assert self.toolkit.call("compute", "ess", {"source": source, "k": 3}).value == 3

    def test_ess_k_and_bound(self, write_function):
        """Test compute ess-k and its bound."""
        parity = [1, 2, 4, 7]
        source = write_function("parity.json", {"n": 3, "ones": parity})
        assert self.toolkit.call("compute", "ess-k", {"source": source, "k": 3}).value == 4
        assert self.toolkit.call("compute", "ess-bound", {"source": source, "k": 3}).value >= 4

    def test_mi(self, write_function):
        """Test compute mi."""
        source = write_function("and.json", {"n": 2, "ones": [3]})
        result = self.toolkit.call("compute", "mi", {"source": source})
        assert result.value == 1
        assert result.artifacts["mi.horn"] == "# n=2\n-> 1 2\n"
        assert result.certificate["clauses"] == 2

    def test_mi_needs_total_function(self, write_function):
        """Test that mi rejects partial functions."""
        source = write_function("fhat.json", {"n": 3, "ones": [3, 5, 6], "stars": [1, 2, 4, 7]})
        with pytest.raises(EssGapError):
            self.toolkit.call("compute", "mi", {"source": source})

    def test_primes(self, write_function):
        """Test compute primes."""
        source = write_function("maj.json", {"n": 3, "ones": [3, 5, 6, 7]})
        assert self.toolkit.call("compute", "primes", {"source": source}).value == 3
        assert self.toolkit.call("compute", "primes", {"source": source, "view": "true"}).value == 3

    def test_min_cover(self, tmp_path):
        """Test compute min-cover."""
        path = tmp_path / "pairs.txt"
        path.write_text("3 3\n1 2\n1 3\n2 3\n")
        result = self.toolkit.call("compute", "min-cover", {"source": str(path)})
        assert result.value == 2
        assert result.certificate["witness"] == [0, 1]

    def test_horn_cnf(self, write_function):
        """Test compute horn-cnf on a non-Horn function."""
        source = write_function("or.json", {"n": 2, "ones": [1, 2, 3]})
        with pytest.raises(EssGapError):
            self.toolkit.call("compute", "horn-cnf", {"source": source})

    def test_bad_input_file(self, tmp_path, write_function):
        """Test a missing input file."""
        with pytest.raises(FormatError):
            self.toolkit.call("compute", "cs", {"source": str(tmp_path / "missing.json")})
        source = write_function("bad.json", {"ones": [1]})
        with pytest.raises(FormatError):
            self.toolkit.call("compute", "cs", {"source": source})


class TestSuiteDefaults:
    """Test cases for the YAML suite defaults."""

    def test_defaults_are_merged(self, tmp_path):
        """Test merging a suite file."""
        path = tmp_path / "suites.yaml"
        path.write_text("min-cert:\n  n_max: 2\n  count: 3\n")
        toolkit = EssGapToolkit({"suite_config_path": str(path)})
        result = toolkit.call("verify", "min-cert", {})
        assert result.params["n_max"] == 2
        assert len(result.rows) == 3
        assert len(toolkit.call("verify", "min-cert", {"count": 1}).rows) == 1

    def test_missing_file(self, no_suite_config):
        """Test that a missing suite file gives no defaults."""
        assert EssGapToolkit(no_suite_config).suite_defaults == {}

    def test_wrong_shape(self, tmp_path):
        """Test that a list suite file is rejected."""
        path = tmp_path / "suites.yaml"
        path.write_text("- lemma1\n- lemma2\n")
        assert EssGapToolkit({"suite_config_path": str(path)}).suite_defaults == {}

    def test_parse_error(self, tmp_path):
        """Test a YAML parse error."""
        path = tmp_path / "suites.yaml"
        path.write_text("lemma1: [unclosed\n")
        assert EssGapToolkit({"suite_config_path": str(path)}).suite_defaults == {}

    def test_repository_defaults(self):
        """Test the repository suite defaults."""
        defaults = EssGapToolkit().suite_defaults
        assert defaults["lemma2"]["trials"] == 200
        assert defaults["horn-gap"]["cases"] == [[3, 1], [3, 2], [4, 2]]
        assert defaults["thm4"]["family_cases"] == [[3, 1], [3, 2], [4, 2]]


class TestOutputs:
    """Test cases for artifacts and rendering."""

    def test_write_gen_artifacts(self, tmp_path):
        """Test writing gen artifacts."""
        toolkit = EssGapToolkit(ToolkitConfig(seed=9))
        result = toolkit.call("gen", "gimpel-general", {"m": 3, "mode": "classic"})
        written = toolkit.write_artifacts(result, str(tmp_path / "out"))
        names = sorted(p.name for p in written)
        assert names == [
            "gimpel_general_classic_m3_r2.json",
            "gimpel_general_classic_m3_r2.provenance.json",
            "gimpel_general_classic_m3_r2.vw.json",
        ]
        provenance = json.loads((tmp_path / "out" / names[1]).read_text())
        assert provenance["family"] == "gimpel-general"
        assert provenance["seed"] == 9
        assert provenance["version"] == __version__
        assert "created" in provenance

    def test_write_compute_artifacts(self, tmp_path, write_function):
        """Test writing compute artifacts to out_dir."""
        toolkit = EssGapToolkit({"out_dir": str(tmp_path / "certs")})
        source = write_function("and.json", {"n": 2, "ones": [3]})
        written = toolkit.write_artifacts(toolkit.call("compute", "cs", {"source": source}))
        assert sorted(p.name for p in written) == ["cs.cnf", "cs.json"]
        assert (tmp_path / "certs" / "cs.json").exists()

    def test_compute_artifacts_default_to_certificate_dir(self, tmp_path, write_function):
        """Test that compute certificates land in certificate_dir when out_dir is unset."""
        toolkit = EssGapToolkit({"certificate_dir": str(tmp_path / "certificates")})
        source = write_function("and.json", {"n": 2, "ones": [3]})
        written = toolkit.write_artifacts(toolkit.call("compute", "cs", {"source": source}))
        assert {p.parent for p in written} == {tmp_path / "certificates"}
        assert (tmp_path / "certificates" / "cs.cnf").exists()

    def test_out_dir_wins_over_certificate_dir(self, tmp_path, write_function):
        """Test that an explicit out_dir takes precedence for compute results."""
        toolkit = EssGapToolkit(
            {"out_dir": str(tmp_path / "out"), "certificate_dir": str(tmp_path / "unused")}
        )
        source = write_function("and.json", {"n": 2, "ones": [3]})
        toolkit.write_artifacts(toolkit.call("compute", "cs", {"source": source}))
        assert (tmp_path / "out" / "cs.json").exists()
        assert not (tmp_path / "unused").exists()

    def test_render(self):
        """Test text rendering."""
        toolkit = EssGapToolkit()
        result = SuiteResult(suite="s", claim="c", rows=[GapReport(family="f")])
        header = toolkit.render(result, "s", OutputFormat.CSV).splitlines()[0]
        assert header == ",".join(CSV_COLUMNS)
        assert json.loads(toolkit.render(result, "s"))["suite"] == "s"
        assert json.loads(toolkit.render(GenResult(family="f", params={}), "f"))["family"] == "f"

    def test_serialize(self):
        """Test serialize_tool_output, including its error payload."""
        assert serialize_tool_output("text", "t") == "text"
        assert json.loads(serialize_tool_output({"b": 1, "a": 2}, "t")) == {"a": 2, "b": 1}
        error = json.loads(serialize_tool_output({"x": object()}, "t"))
        assert error["error"] == "Serialization failed for t"
