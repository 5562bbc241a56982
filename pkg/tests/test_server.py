from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from conftest import make_record
from mcqlab.corpus_io import load_corpus
from mcqlab.scoring import score_total
from mcqlab.server import create_app
from mcqlab.store import AnnotationStore, RevisionConflict

ARTICLE = {
    "id": "srv1.txt",
    "article": ("The letter arrived on a gray morning in late autumn. Nobody "
                "recognised the unfamiliar handwriting on the envelope.\n"
                "Inside was a map of the old orchard, drawn decades earlier. "
                "The family spent the whole winter discussing what to do."),
    "questions": ["What arrived in the morning?", "The map showed _ ."],
    "options": [["A letter.", "A parcel.", "A visitor.", "A newspaper."],
                ["the orchard", "the river", "the town", "the harbour"]],
    "answers": ["A", "A"],
}


@pytest.fixture
def corpus_path(tmp_path):
    p = tmp_path / "corpus.jsonl"
    p.write_text(json.dumps(ARTICLE) + "\n", encoding="utf-8")
    return p


@pytest.fixture
def store(tmp_path, corpus_path):
    corpus = load_corpus(corpus_path)
    return AnnotationStore(corpus, tmp_path / "log.jsonl")


@pytest.fixture
def client(store):
    return TestClient(create_app(store.corpus, store))


def test_corpus_index_and_progress(client):
    data = client.get("/api/corpus").json()
    assert data["progress"] == {"annotated": 0, "total": 2}
    assert [m["mcq_id"] for m in data["mcqs"]] == ["srv1.txt:q0", "srv1.txt:q1"]


def test_mcq_bundle(client):
    data = client.get("/api/mcq/srv1.txt:q0").json()
    assert data["mcq"]["stem"] == "What arrived in the morning?"
    assert len(data["mcq"]["alternatives"]) == 4
    assert data["mcq"]["stem_style"] == "interrogative"
    assert data["passage"]["body"].startswith("The letter arrived")
    assert data["annotation"] is None
    assert data["revision"] == 0
    assert "suggestions" in data


def test_gap_stem_reports_fill_in_gap(client):
    data = client.get("/api/mcq/srv1.txt:q1").json()
    assert data["mcq"]["stem_style"] == "fill_in_gap"


def test_unknown_mcq_404(client):
    assert client.get("/api/mcq/missing:q0").status_code == 404
    assert client.put("/api/annotation/missing:q0", json={}).status_code == 404


def test_put_complete_record_returns_scorecard(client):
    record = make_record("srv1.txt:q0").to_json()
    resp = client.put("/api/annotation/srv1.txt:q0", json=record)
    assert resp.status_code == 200
    body = resp.json()
    assert body["findings"] == []
    assert body["scorecard"]["total"] == 2.5
    assert body["revision"] == 1


def test_put_incomplete_record_persists_with_findings(client):
    record = {"mcq_id": "srv1.txt:q0", "toi_concepts": "person"}
    body = client.put("/api/annotation/srv1.txt:q0", json=record).json()
    assert body["scorecard"] is None
    variables = {f["variable"] for f in body["findings"]}
    assert "POD" in variables and "TOC" in variables
    assert body["revision"] == 1
    # write-then-read returns the stored record
    bundle = client.get("/api/mcq/srv1.txt:q0").json()
    assert bundle["annotation"] == {"mcq_id": "srv1.txt:q0",
                                    "toi_concepts": "person"}


def test_put_invalid_vocabulary_rejected_keeps_revision(client):
    good = make_record("srv1.txt:q0").to_json()
    assert client.put("/api/annotation/srv1.txt:q0", json=good).status_code == 200
    bad = dict(good, toc="percentage")
    resp = client.put("/api/annotation/srv1.txt:q0", json=bad)
    assert resp.status_code == 422
    bundle = client.get("/api/mcq/srv1.txt:q0").json()
    assert bundle["revision"] == 1
    assert bundle["annotation"]["toc"] == "none"


def test_put_span_beyond_body_rejected(client):
    record = dict(make_record("srv1.txt:q0").to_json(),
                  bases=[{"label": "A", "start": 0, "end": 100000}])
    assert client.put("/api/annotation/srv1.txt:q0", json=record).status_code == 422


def test_revision_conflict(client):
    record = make_record("srv1.txt:q0").to_json()
    client.put("/api/annotation/srv1.txt:q0", json=record)
    ok = client.put("/api/annotation/srv1.txt:q0?expected_revision=1", json=record)
    assert ok.status_code == 200
    assert ok.json()["revision"] == 2
    stale = client.put("/api/annotation/srv1.txt:q0?expected_revision=1", json=record)
    assert stale.status_code == 409


def test_stateless_score_matches_library(client):
    record = make_record("srv1.txt:q0", toi_concepts="theme", tom_tq="SM",
                         tom_ta="LLTI", toc="multiple")
    resp = client.post("/api/score", json=record.to_json())
    assert resp.status_code == 200
    assert resp.json()["scorecard"] == score_total(record).to_json()


def test_report_endpoint(client):
    record = make_record("srv1.txt:q0").to_json()
    client.put("/api/annotation/srv1.txt:q0", json=record)
    trace = client.get("/api/report/gate_trace").json()
    assert trace["stages"][0]["mcqs"] == 1
    diff = client.get("/api/report/difficulty").json()
    assert diff["count"] == 1
    assert client.get("/api/report/nonsense").status_code == 404


def test_vocabulary_endpoint(client):
    vocab = client.get("/api/vocabulary").json()
    assert "TOM" in vocab["variables"]


def test_store_replay_and_compaction(tmp_path, corpus_path):
    corpus = load_corpus(corpus_path)
    log = tmp_path / "log.jsonl"
    store = AnnotationStore(corpus, log)
    store.put("srv1.txt:q0", {"toi_concepts": "person"})
    store.put("srv1.txt:q0", make_record("srv1.txt:q0").to_json())
    store.put("srv1.txt:q1", {"toc": "none"})
    assert len(log.read_text().splitlines()) == 3

    # crash recovery replays the log
    recovered = AnnotationStore(corpus, log)
    record, revision = recovered.get("srv1.txt:q0")
    assert revision == 2
    assert record.toc == "none"

    recovered.compact()
    assert len(log.read_text().splitlines()) == 2
    again = AnnotationStore(corpus, log)
    assert again.get("srv1.txt:q0")[1] == 2


def test_store_revision_conflict_raises(tmp_path, corpus_path):
    corpus = load_corpus(corpus_path)
    store = AnnotationStore(corpus, tmp_path / "log.jsonl")
    store.put("srv1.txt:q0", {"toi_concepts": "person"})
    with pytest.raises(RevisionConflict):
        store.put("srv1.txt:q0", {"toi_concepts": "person"}, expected_revision=0)
