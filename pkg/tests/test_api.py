import numpy as np
import pytest
from fastapi.testclient import TestClient

from affordance_forge import images
from affordance_forge.api import create_annotation_app
from affordance_forge.core.store import DatasetStore, DatasetView, validate_dataset
from affordance_forge.fixtures import build_corpus, make_sweeping_scene
from affordance_forge.gateway import LocalMockServices, registry_from_stores
from affordance_forge.synthesis import SynthesisConfig, synthesize_dataset
from affordance_forge.transform import TransformConfig


@pytest.fixture()
def api_store(tmp_path) -> DatasetStore:
    store = build_corpus(tmp_path / "ds", n=3, novel_count=0)
    out = DatasetStore(tmp_path / "synth", create=True)
    services = LocalMockServices(registry_from_stores([store]), inpaint_mode="passthrough")
    synthesize_dataset(
        store, out, services,
        SynthesisConfig(target_size=2, transform=TransformConfig.identity(), master_seed=1),
    )
    return store, out


@pytest.fixture()
def client(api_store):
    store, out = api_store
    return TestClient(create_annotation_app([store, out]))


def valid_keypoints_payload(store: DatasetStore, record_id: str) -> dict:
    record = store.get_record(record_id)
    return {
        role.value: {"x": b.point.x, "y": b.point.y, "object_index": b.object_index}
        for role, b in record.keypoints.items()
    }


class TestScenes:
    def test_paged_list(self, client):
        body = client.get("/scenes", params={"page": 1, "page_size": 2}).json()
        assert body["total"] == 5
        assert len(body["scenes"]) == 2
        first = body["scenes"][0]
        assert {"record_id", "keypoints", "version", "review", "kind"} <= set(first)

    def test_kind_filter(self, client):
        body = client.get("/scenes", params={"kind": "synthetic"}).json()
        assert body["total"] == 2
        assert all(s["kind"] == "synthetic" for s in body["scenes"])

    def test_detail_includes_dimensions(self, client):
        body = client.get("/scenes/human-0000").json()
        assert (body["width"], body["height"]) == (640, 480)

    def test_unknown_scene_404(self, client):
        assert client.get("/scenes/nope").status_code == 404

    def test_image_depth_context_payloads(self, client):
        for path, expect in (
            ("/scenes/human-0000/image", "image/png"),
            ("/scenes/human-0000/depth", "image/png"),
            ("/scenes/human-0000/context?kind=soft_edge", "image/png"),
            ("/scenes/human-0000/context?kind=seg_mask", "image/png"),
            ("/scenes/human-0000/context?kind=depth", "image/png"),
        ):
            response = client.get(path)
            assert response.status_code == 200
            assert response.headers["content-type"] == expect
            assert response.content[:8] == b"\x89PNG\r\n\x1a\n"


class TestKeypointMutation:
    def test_put_bumps_version(self, client, api_store):
        store, _ = api_store
        payload = valid_keypoints_payload(store, "human-0000")
        response = client.put(
            "/scenes/human-0000/keypoints", json={"version": 1, "keypoints": payload}
        )
        assert response.status_code == 200
        assert response.json()["version"] == 2

    def test_stale_version_conflict(self, client, api_store):
        store, _ = api_store
        payload = valid_keypoints_payload(store, "human-0000")
        assert client.put(
            "/scenes/human-0000/keypoints", json={"version": 1, "keypoints": payload}
        ).status_code == 200
        stale = client.put(
            "/scenes/human-0000/keypoints", json={"version": 1, "keypoints": payload}
        )
        assert stale.status_code == 409
        assert stale.json()["current_version"] == 2

    def test_version_token_required(self, client, api_store):
        store, _ = api_store
        payload = valid_keypoints_payload(store, "human-0000")
        response = client.put("/scenes/human-0000/keypoints", json={"keypoints": payload})
        assert response.status_code == 422  # body schema requires the token

    def test_out_of_bounds_rejected_with_violations(self, client, api_store):
        store, _ = api_store
        payload = valid_keypoints_payload(store, "human-0000")
        payload["grasp"]["x"] = 640.0
        response = client.put(
            "/scenes/human-0000/keypoints", json={"version": 1, "keypoints": payload}
        )
        assert response.status_code == 400
        violations = response.json()["violations"]
        assert any(v["code"] == "out_of_bounds" for v in violations)

    def test_missing_role_rejected(self, client, api_store):
        store, _ = api_store
        payload = valid_keypoints_payload(store, "human-0000")
        del payload["grasp"]
        response = client.put(
            "/scenes/human-0000/keypoints", json={"version": 1, "keypoints": payload}
        )
        assert response.status_code == 400
        assert any(v["code"] == "missing_role" for v in response.json()["violations"])

    def test_mutations_leave_dataset_valid(self, client, api_store):
        store, out = api_store
        payload = valid_keypoints_payload(store, "human-0001")
        client.put("/scenes/human-0001/keypoints", json={"version": 1, "keypoints": payload})
        reports = validate_dataset(DatasetView([store, out]))
        assert all(r.ok for r in reports)


class TestUpload:
    def test_upload_then_annotate(self, client, api_store):
        store, out = api_store
        scene = make_sweeping_scene(7, 99)
        body = {
            "task_id": "table_sweeping",
            "instruction": "Use the brush to sweep the snack package.",
            "objects": ["brush", "snack package"],
            "image": images.b64encode_png(images.encode_rgb_png(scene.rgb)),
            "object_set": "uploads",
        }
        response = client.post("/scenes", json=body)
        assert response.status_code == 201
        record_id = response.json()["record_id"]

        detail = client.get(f"/scenes/{record_id}").json()
        assert detail["annotated"] is False

        # drafts keep the dataset valid
        reports = validate_dataset(DatasetView([store, out]))
        assert all(r.ok for r in reports)

        payload = {
            role.value: {"x": b.point.x, "y": b.point.y, "object_index": b.object_index}
            for role, b in scene.record.keypoints.items()
        }
        put = client.put(
            f"/scenes/{record_id}/keypoints", json={"version": 1, "keypoints": payload}
        )
        assert put.status_code == 200
        assert client.get(f"/scenes/{record_id}").json()["annotated"] is True

    def test_unknown_task_rejected(self, client):
        body = {
            "task_id": "no_such_task",
            "instruction": "x",
            "objects": ["thing"],
            "image": images.b64encode_png(
                images.encode_rgb_png(np.zeros((8, 8, 3), dtype=np.uint8))
            ),
        }
        response = client.post("/scenes", json=body)
        assert response.status_code == 400


class TestReviewFlow:
    def test_next_and_verdicts(self, client):
        first = client.get("/review/next").json()["record"]
        assert first is not None and first["kind"] == "synthetic"

        accept = client.post(f"/review/{first['record_id']}", json={"verdict": "accept"})
        assert accept.status_code == 200

        second = client.get("/review/next").json()["record"]
        assert second["record_id"] != first["record_id"]
        client.post(f"/review/{second['record_id']}", json={"verdict": "reject",
                                                            "note": "artifacts"})
        assert client.get("/review/next").json()["record"] is None

    def test_verdicts_survive_server_restart(self, api_store):
        store, out = api_store
        client = TestClient(create_annotation_app([store, out]))
        record = client.get("/review/next").json()["record"]
        client.post(f"/review/{record['record_id']}", json={"verdict": "accept"})

        fresh = TestClient(create_annotation_app([DatasetStore(store.root),
                                                  DatasetStore(out.root)]))
        states = {
            s["record_id"]: s["review"]
            for s in fresh.get("/scenes", params={"kind": "synthetic"}).json()["scenes"]
        }
        assert states[record["record_id"]] == "accepted"

    def test_bad_verdict_rejected(self, client):
        record = client.get("/review/next").json()["record"]
        response = client.post(f"/review/{record['record_id']}", json={"verdict": "maybe"})
        assert response.status_code == 400


class TestSchemaEndpoint:
    def test_schema_payload(self, client):
        body = client.get("/schema/table_sweeping").json()
        assert body["task_id"] == "table_sweeping"
        assert set(body["required_roles"]) == {
            "grasp", "function", "target", "pre_contact", "post_contact"
        }
        assert body["gripper_orientation_mode"]["mode"] == "yaw_from_grasp_to_function"

    def test_unknown_schema_404(self, client):
        assert client.get("/schema/nope").status_code == 404

    def test_task_listing(self, client):
        assert "table_sweeping" in client.get("/tasks").json()["tasks"]
