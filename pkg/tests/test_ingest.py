import pytest

from stylospace import ingest
from stylospace.ingest import AuthorRule, IngestConfig


def make_tree(tmp_path, files):
    for rel, content in files.items():
        p = tmp_path / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(content, bytes):
            p.write_bytes(content)
        else:
            p.write_text(content, encoding="utf-8")
    return tmp_path


class TestAuthorOf:
    def test_first_segment(self):
        assert ingest.author_of("google/proj/a.py") == "google"

    def test_bare_filename(self):
        assert ingest.author_of("a.py") == "unknown"

    def test_deep_path(self):
        assert ingest.author_of("plotly/x/y/b.py") == "plotly"

    def test_regex_rule(self):
        rule = AuthorRule(pattern=r"^[^/]+/([^/]+)/")
        assert ingest.author_of("org/repo/file.py", rule) == "repo"
        assert ingest.author_of("file.py", rule) == "unknown"

    def test_empty_path_rejected(self):
        with pytest.raises(ValueError):
            ingest.author_of("")


class TestScanCorpus:
    def test_dedup_identical_content(self, tmp_path):
        root = make_tree(
            tmp_path, {"a/one.py": "x = 1\n", "b/two.py": "x = 1\n"}
        )
        units, report = ingest.scan_corpus(root)
        assert len(units) == 1
        assert report.duplicates == 1
        assert units[0].path == "a/one.py"  # lexicographically first wins

    def test_empty_file_checksum_is_md5_vector(self, tmp_path):
        # RFC 1321 test vector: MD5("") = d41d8cd98f00b204e9800998ecf8427e
        root = make_tree(tmp_path, {"a/empty.py": ""})
        units, _ = ingest.scan_corpus(root)
        assert units[0].checksum == "d41d8cd98f00b204e9800998ecf8427e"
        assert units[0].line_count == 1

    def test_syntax_error_excluded(self, tmp_path):
        root = make_tree(tmp_path, {"a/bad.py": "def f(:", "a/ok.py": "x = 1\n"})
        units, report = ingest.scan_corpus(root)
        assert [u.path for u in units] == ["a/ok.py"]
        assert report.unparseable == 1

    def test_python2_print_is_unparseable(self, tmp_path):
        root = make_tree(tmp_path, {"a/old.py": "print 'hello'\n"})
        units, report = ingest.scan_corpus(root)
        assert units == []
        assert report.unparseable == 1

    def test_oversize_excluded(self, tmp_path):
        big = "# pad\n" * 300
        root = make_tree(tmp_path, {"a/big.py": big, "a/small.py": "y = 2\n"})
        cfg = IngestConfig(max_file_bytes=100)
        units, report = ingest.scan_corpus(root, cfg)
        assert [u.path for u in units] == ["a/small.py"]
        assert report.oversize == 1

    def test_non_utf8_excluded(self, tmp_path):
        root = make_tree(tmp_path, {"a/latin.py": b"x = '\xe9'\n"})
        units, report = ingest.scan_corpus(root)
        assert units == []
        assert report.unparseable == 1

    def test_missing_root_fatal(self, tmp_path):
        with pytest.raises(OSError):
            ingest.scan_corpus(tmp_path / "nope")

    def test_deterministic_order_and_counts(self, tmp_path):
        root = make_tree(
            tmp_path,
            {
                "b/y.py": "b = 2\n",
                "a/x.py": "a = 1\n",
                "c/z.py": "c = 3\n",
            },
        )
        units, report = ingest.scan_corpus(root)
        assert [u.path for u in units] == ["a/x.py", "b/y.py", "c/z.py"]
        assert report.scanned == 3
        assert report.admitted == 3

    def test_workers_do_not_change_output(self, tmp_path):
        files = {f"u{i % 4}/m{i}.py": f"v{i} = {i}\n" for i in range(24)}
        files["u0/dup.py"] = files["u1/m1.py"]
        root = make_tree(tmp_path, files)
        serial = ingest.scan_corpus(root, workers=1)
        threaded = ingest.scan_corpus(root, workers=4)
        assert [u.to_json() for u in serial[0]] == [u.to_json() for u in threaded[0]]
        assert serial[1] == threaded[1]

    def test_idempotent_bytes(self, tmp_path):
        root = make_tree(tmp_path, {"a/f.py": "def f():\n    return 1\n"})
        out1 = tmp_path / "c1.jsonl"
        out2 = tmp_path / "c2.jsonl"
        ingest.write_corpus(ingest.scan_corpus(root)[0], out1)
        ingest.write_corpus(ingest.scan_corpus(root)[0], out2)
        assert out1.read_bytes() == out2.read_bytes()

    def test_every_unit_parses(self, tmp_path):
        root = make_tree(
            tmp_path,
            {"a/f.py": "class A:\n    pass\n", "a/g.py": "def g(): ...\n"},
        )
        units, _ = ingest.scan_corpus(root)
        from stylospace import pysyntax

        assert all(pysyntax.parse_ok(u.content) for u in units)
        assert all(u.parse_ok for u in units)

    def test_no_shared_checksums(self, tmp_path):
        files = {f"a/f{i}.py": f"x = {i % 5}\n" for i in range(10)}
        root = make_tree(tmp_path, files)
        units, _ = ingest.scan_corpus(root)
        sums = [u.checksum for u in units]
        assert len(sums) == len(set(sums)) == 5


class TestCorpusIO:
    def test_round_trip(self, tmp_path):
        root = make_tree(tmp_path / "src", {"a/f.py": "x = 'é'  # note\n"})
        units, _ = ingest.scan_corpus(root)
        path = tmp_path / "corpus.jsonl"
        ingest.write_corpus(units, path)
        back = ingest.read_corpus(path)
        assert back == units

    def test_duplicate_author_path_rejected(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        unit = ingest.SourceUnit(
            id="d41d", path="a/f.py", author="a", content="",
            checksum="d41d", line_count=1, parse_ok=True,
        )
        ingest.write_corpus([unit, unit], path)
        with pytest.raises(ValueError):
            ingest.read_corpus(path)

    def test_bad_record_rejected(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text('{"id": "x"}\n')
        with pytest.raises(ValueError):
            ingest.read_corpus(path)
