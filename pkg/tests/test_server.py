import json
import socket

import httpx
import pytest
from fastapi.testclient import TestClient

from aiodc.annotate import CorruptPersistence
from aiodc.ingest import keras_github_dataset_path
from aiodc.server import (
    BindFailure,
    ConfigError,
    ServerConfig,
    create_app,
    serve,
)

from .oracles import expected_severity


@pytest.fixture()
def config(tmp_path) -> ServerConfig:
    return ServerConfig(
        root=tmp_path,
        dataset_path=keras_github_dataset_path(),
        persistence_path=tmp_path / "log.jsonl",
    )


@pytest.fixture()
def client(config) -> TestClient:
    with TestClient(create_app(config)) as c:
        yield c


def make_session(client, sid="s1", defects=("KG-001", "KG-002", "KG-003")):
    response = client.post(
        "/sessions",
        json={
            "id": sid,
            "project": "demo",
            "defects": list(defects),
            "annotators": ["ada", "bea", "cal"],
        },
    )
    assert response.status_code == 201, response.text
    return response.json()


def label_obj(defect_id, ai="Learning", severity="High", impacts=()):
    return {
        "defect_id": defect_id,
        "ai": ai,
        "severity": severity,
        "impacts": list(impacts),
    }


class TestConfig:
    def test_port_range_checked(self):
        with pytest.raises(ConfigError):
            ServerConfig(port=70000)

    def test_relative_paths_resolve_against_root(self, tmp_path):
        cfg = ServerConfig(root=tmp_path, persistence_path="log.jsonl")
        assert cfg.persistence == tmp_path / "log.jsonl"

    def test_from_file_defaults_root_to_config_dir(self, tmp_path):
        path = tmp_path / "service.json"
        path.write_text(json.dumps({"port": 9000, "persistence": "x.jsonl"}))
        cfg = ServerConfig.from_file(path)
        assert cfg.port == 9000
        assert cfg.persistence == tmp_path / "x.jsonl"

    def test_from_file_rejects_non_object(self, tmp_path):
        path = tmp_path / "service.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            ServerConfig.from_file(path)


class TestReadEndpoints:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body == {"status": "ok", "sessions": 0}

    def test_taxonomy_lists_characteristics(self, client):
        body = client.get("/taxonomy").json()
        names = [c["name"] for c in body["characteristics"]]
        assert "Trustworthiness" in names and "Accuracy" in names
        keys = [(c["layer"], c["name"]) for c in body["characteristics"]]
        assert keys == sorted(keys)

    def test_rubric_severities_and_attributes(self, client):
        body = client.get("/rubric").json()
        assert body["ai_attributes"][0]["value"] == "Data"
        assert "Unclassified" not in [a["value"] for a in body["ai_attributes"]]
        tiers = [s["value"] for s in body["severities"]]
        assert tiers == ["Catastrophic", "Critical", "High", "Medium", "Low"]
        assert body["severities"][0]["rank"] == 5

    def test_rubric_severity_preview_matches_decision_table(self, client):
        preview = client.get("/rubric").json()["severity_preview"]
        assert len(preview) == 18
        for entry in preview:
            assert entry["severity"] == expected_severity(
                entry["criticality"], entry["reversibility"], entry["scope"]
            )


class TestSessionLifecycle:
    def test_create_and_list(self, client):
        created = make_session(client)
        assert created["annotators"] == ["ada", "bea", "cal"]
        listing = client.get("/sessions").json()["sessions"]
        assert [s["id"] for s in listing] == ["s1"]
        assert listing[0]["defect_count"] == 3
        assert listing[0]["progress"]["pending"] == 3

    def test_create_defaults_to_whole_dataset(self, client):
        response = client.post(
            "/sessions", json={"annotators": ["ada", "bea"]}
        )
        assert response.status_code == 201
        assert response.json()["defect_count"] == 42

    def test_identical_recreate_is_idempotent(self, client):
        make_session(client)
        again = client.post(
            "/sessions",
            json={
                "id": "s1",
                "project": "demo",
                "defects": ["KG-001", "KG-002", "KG-003"],
                "annotators": ["ada", "bea", "cal"],
            },
        )
        assert again.status_code == 200
        assert again.json()["id"] == "s1"

    def test_conflicting_recreate_is_rejected(self, client):
        make_session(client)
        clash = client.post(
            "/sessions",
            json={"id": "s1", "defects": ["KG-001"], "annotators": ["x", "y"]},
        )
        assert clash.status_code == 409
        assert clash.json()["error"] == "SessionExists"

    def test_unknown_defect_rejected(self, client):
        response = client.post(
            "/sessions",
            json={"defects": ["KG-001", "NOPE"], "annotators": ["a", "b"]},
        )
        assert response.status_code == 404

    def test_too_few_annotators_rejected(self, client):
        response = client.post(
            "/sessions", json={"defects": ["KG-001"], "annotators": ["solo"]}
        )
        assert response.status_code == 422

    def test_duplicate_defects_rejected(self, client):
        response = client.post(
            "/sessions",
            json={"defects": ["KG-001", "KG-001"], "annotators": ["a", "b"]},
        )
        assert response.status_code == 422


class TestLabelingFlow:
    def test_next_serves_lowest_unlabeled_id_blind(self, client):
        make_session(client)
        client.post(
            "/sessions/s1/labels",
            json={"annotator": "bea", "label": label_obj("KG-001", ai="Data")},
        )
        body = client.get("/sessions/s1/next", params={"annotator": "ada"}).json()
        assert body["remaining"] == 3
        defect = body["defect"]
        assert defect["id"] == "KG-001"
        # a task is the record alone; the co-annotator's verdict on the
        # same defect must not ride along
        assert set(body) == {"defect", "remaining"}
        assert "ai" not in defect and "annotator" not in defect
        assert "Data" not in json.dumps(body)

    def test_next_advances_per_annotator(self, client):
        make_session(client)
        client.post(
            "/sessions/s1/labels",
            json={"annotator": "ada", "label": label_obj("KG-001")},
        )
        ada = client.get("/sessions/s1/next", params={"annotator": "ada"}).json()
        bea = client.get("/sessions/s1/next", params={"annotator": "bea"}).json()
        assert ada["defect"]["id"] == "KG-002" and ada["remaining"] == 2
        assert bea["defect"]["id"] == "KG-001" and bea["remaining"] == 3

    def test_next_exhausts_to_none(self, client):
        make_session(client, defects=("KG-001",))
        client.post(
            "/sessions/s1/labels",
            json={"annotator": "ada", "label": label_obj("KG-001")},
        )
        body = client.get("/sessions/s1/next", params={"annotator": "ada"}).json()
        assert body == {"defect": None, "remaining": 0}

    def test_unknown_session_and_annotator_404(self, client):
        make_session(client)
        assert (
            client.get("/sessions/ghost/next", params={"annotator": "ada"})
        ).status_code == 404
        assert (
            client.get("/sessions/s1/next", params={"annotator": "ghost"})
        ).status_code == 404

    def test_label_status_transitions(self, client):
        make_session(client)
        first = client.post(
            "/sessions/s1/labels",
            json={"annotator": "ada", "label": label_obj("KG-001", ai="Data")},
        )
        assert first.json() == {"defect_id": "KG-001", "status": "Pending"}
        second = client.post(
            "/sessions/s1/labels",
            json={"annotator": "bea", "label": label_obj("KG-001", ai="Learning")},
        )
        assert second.json()["status"] == "Disputed"

    def test_label_body_needs_label_object(self, client):
        make_session(client)
        response = client.post("/sessions/s1/labels", json={"annotator": "ada"})
        assert response.status_code == 422

    def test_bad_attribute_name_is_422(self, client):
        make_session(client)
        response = client.post(
            "/sessions/s1/labels",
            json={"annotator": "ada", "label": label_obj("KG-001", ai="Vibes")},
        )
        assert response.status_code == 422

    def test_disputes_and_resolution(self, client):
        make_session(client)
        client.post(
            "/sessions/s1/labels",
            json={
                "annotator": "ada",
                "label": label_obj(
                    "KG-001", ai="Data", impacts=["AI:Trustworthiness/Accuracy"]
                ),
            },
        )
        client.post(
            "/sessions/s1/labels",
            json={"annotator": "bea", "label": label_obj("KG-001", ai="Learning")},
        )
        disputes = client.get("/sessions/s1/disputes").json()
        assert disputes["attribute"] == "combined"
        assert [d["defect_id"] for d in disputes["disputes"]] == ["KG-001"]
        row = disputes["disputes"][0]
        assert row["impact_difference"] == ["AI:Trustworthiness/Accuracy"]
        assert [l["annotator"] for l in row["labels"]] == ["ada", "bea"]

        party = client.post(
            "/sessions/s1/resolutions",
            json={"resolver": "ada", "label": label_obj("KG-001", ai="Data")},
        )
        assert party.status_code == 403

        ok = client.post(
            "/sessions/s1/resolutions",
            json={"resolver": "cal", "label": label_obj("KG-001", ai="Data")},
        )
        assert ok.json() == {"defect_id": "KG-001", "status": "Resolved"}
        assert client.get("/sessions/s1/disputes").json()["disputes"] == []

        frozen = client.post(
            "/sessions/s1/labels",
            json={"annotator": "ada", "label": label_obj("KG-001")},
        )
        assert frozen.status_code == 409

    def test_resolving_an_undisputed_defect_conflicts(self, client):
        make_session(client)
        response = client.post(
            "/sessions/s1/resolutions",
            json={"resolver": "cal", "label": label_obj("KG-002")},
        )
        assert response.status_code == 409
        assert response.json()["error"] == "NotDisputed"

    def test_dispute_attribute_filter(self, client):
        make_session(client)
        client.post(
            "/sessions/s1/labels",
            json={
                "annotator": "ada",
                "label": label_obj("KG-001", severity="High"),
            },
        )
        client.post(
            "/sessions/s1/labels",
            json={
                "annotator": "bea",
                "label": label_obj("KG-001", severity="Low"),
            },
        )
        by_ai = client.get(
            "/sessions/s1/disputes", params={"attribute": "ai"}
        ).json()
        by_sev = client.get(
            "/sessions/s1/disputes", params={"attribute": "severity"}
        ).json()
        assert by_ai["disputes"] == []
        assert [d["defect_id"] for d in by_sev["disputes"]] == ["KG-001"]

    def test_bad_dispute_attribute_is_422(self, client):
        make_session(client)
        response = client.get(
            "/sessions/s1/disputes", params={"attribute": "vibes"}
        )
        assert response.status_code == 422


class TestStats:
    def test_fresh_session_reports_zero_progress(self, client):
        make_session(client)
        stats = client.get("/sessions/s1/stats").json()
        assert stats["progress"]["total"] == 3
        assert stats["progress"]["percent_complete"] == 0.0
        assert stats["agreement"]["ai"]["error"] == "NoOverlap"
        assert stats["one_way"]["ai"]["total"] == 0
        assert stats["independence"]["error"] == "DegenerateTable"

    def test_agreement_and_analysis_on_ready_labels(self, client):
        make_session(client)
        for defect, ai in (
            ("KG-001", "Data"),
            ("KG-002", "Learning"),
            ("KG-003", "Learning"),
        ):
            for annotator in ("ada", "bea"):
                client.post(
                    "/sessions/s1/labels",
                    json={"annotator": annotator, "label": label_obj(defect, ai=ai)},
                )
        stats = client.get("/sessions/s1/stats").json()
        assert stats["progress"]["labeled"] == 3
        assert stats["progress"]["percent_complete"] == 100.0
        assert stats["agreement"]["ai"]["kappa"] == 1.0
        assert stats["agreement"]["ai"]["n"] == 3
        assert stats["one_way"]["ai"]["total"] == 3
        assert stats["two_way"]["row_marginals"] == [1, 2, 0, 0]

    def test_disputed_labels_stay_out_of_analysis(self, client):
        make_session(client)
        client.post(
            "/sessions/s1/labels",
            json={"annotator": "ada", "label": label_obj("KG-001", ai="Data")},
        )
        client.post(
            "/sessions/s1/labels",
            json={"annotator": "bea", "label": label_obj("KG-001", ai="Learning")},
        )
        stats = client.get("/sessions/s1/stats").json()
        assert stats["progress"]["disputed"] == 1
        assert stats["one_way"]["ai"]["total"] == 0


class TestAnalysisEndpoints:
    def test_baseline_one_way_uses_bundled_rules(self, client):
        body = client.get("/analysis/one-way", params={"attr": "ai"}).json()
        rows = {r["category"]: r["count"] for r in body["rows"]}
        assert rows == {"Data": 2, "Learning": 18, "Thinking": 14, "NotRelated": 8}
        assert body["total"] == 42

    def test_baseline_two_way_carries_independence(self, client):
        body = client.get("/analysis/two-way").json()
        assert body["row_marginals"] == [2, 18, 14, 8]
        assert body["col_marginals"] == [9, 10, 12, 11, 0]
        assert body["independence"]["dof"] == 9
        assert body["independence"]["p_value"] < 1e-6

    def test_session_scoped_analysis(self, client):
        make_session(client, defects=("KG-001",))
        for annotator in ("ada", "bea"):
            client.post(
                "/sessions/s1/labels",
                json={
                    "annotator": annotator,
                    "label": label_obj("KG-001", ai="Data"),
                },
            )
        body = client.get(
            "/analysis/one-way", params={"attr": "ai", "session": "s1"}
        ).json()
        assert body["total"] == 1
        assert body["rows"][0] == {"category": "Data", "count": 1, "percent": 100.0}

    def test_unknown_session_scoped_analysis_404(self, client):
        response = client.get("/analysis/one-way", params={"session": "ghost"})
        assert response.status_code == 404


class TestPersistence:
    def test_restart_replays_everything(self, config):
        with TestClient(create_app(config)) as first:
            make_session(first)
            first.post(
                "/sessions/s1/labels",
                json={"annotator": "ada", "label": label_obj("KG-001", ai="Data")},
            )
            first.post(
                "/sessions/s1/labels",
                json={
                    "annotator": "bea",
                    "label": label_obj("KG-001", ai="Learning"),
                },
            )
            first.post(
                "/sessions/s1/resolutions",
                json={"resolver": "cal", "label": label_obj("KG-001", ai="Data")},
            )
            before = first.get("/sessions/s1/stats").json()

        with TestClient(create_app(config)) as second:
            after = second.get("/sessions/s1/stats").json()
            assert after == before
            assert after["progress"]["resolved"] == 1
            # and the service keeps accepting new events
            more = second.post(
                "/sessions/s1/labels",
                json={"annotator": "ada", "label": label_obj("KG-002")},
            )
            assert more.status_code == 200

    def test_corrupt_log_refuses_to_start(self, config):
        config.persistence.write_text('{"event": "label"}\n')
        with pytest.raises(CorruptPersistence) as exc:
            create_app(config)
        assert exc.value.line == 1

    def test_half_written_tail_line_reports_its_number(self, config):
        with TestClient(create_app(config)) as first:
            make_session(first)
        with config.persistence.open("a") as fh:
            fh.write('{"event": "label", "annotator"')
        with pytest.raises(CorruptPersistence) as exc:
            create_app(config)
        assert exc.value.line == 2


class TestStaticUi:
    def test_ui_is_served_when_static_dir_exists(self, tmp_path):
        static = tmp_path / "static"
        static.mkdir()
        (static / "index.html").write_text("<h1>workbench</h1>")
        cfg = ServerConfig(
            root=tmp_path,
            dataset_path=keras_github_dataset_path(),
            persistence_path=tmp_path / "log.jsonl",
            static_path=static,
        )
        with TestClient(create_app(cfg)) as client:
            response = client.get("/ui/")
            assert response.status_code == 200
            assert "workbench" in response.text


class TestLiveService:
    def test_serve_accepts_requests_then_stops(self, tmp_path):
        cfg = ServerConfig(
            port=0,
            root=tmp_path,
            dataset_path=keras_github_dataset_path(),
            persistence_path=tmp_path / "log.jsonl",
        )
        handle = serve(cfg, block=False)
        try:
            body = httpx.get(f"{handle.url}/health", timeout=10.0).json()
            assert body["status"] == "ok"
        finally:
            handle.stop()
        handle.stop()  # idempotent

    def test_occupied_port_fails_fast(self, tmp_path):
        blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        try:
            cfg = ServerConfig(
                port=port,
                root=tmp_path,
                dataset_path=keras_github_dataset_path(),
                persistence_path=tmp_path / "log.jsonl",
            )
            with pytest.raises(BindFailure):
                serve(cfg, block=False)
        finally:
            blocker.close()
