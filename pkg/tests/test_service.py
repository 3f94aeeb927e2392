import json
import threading

import pytest
import requests

from isf.metasearch import RemoteBackend
from isf.pipeline import Pipeline
from isf.service import make_server

from test_pipeline import build_pipeline


@pytest.fixture
def service(tmp_path):
    servers = []

    def factory(pipeline: Pipeline) -> str:
        server = make_server(pipeline, port=0)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        servers.append((server, thread))
        host, port = server.server_address[:2]
        return f"http://{host}:{port}"

    yield factory
    for server, thread in servers:
        server.shutdown()
        server.server_close()
        thread.join(timeout=5)


@pytest.fixture
def base_url(tmp_path, service):
    return service(build_pipeline(tmp_path))


def test_health(base_url):
    resp = requests.get(f"{base_url}/health")
    assert resp.status_code == 200
    assert resp.text == "ok"


def test_search_returns_entries(base_url):
    resp = requests.get(f"{base_url}/search", params={"q": "jaguar"})
    assert resp.status_code == 200
    payload = resp.json()
    assert payload["query"] == "jaguar"
    assert payload["entries"]
    first = payload["entries"][0]
    for field in ("url", "title", "snippet", "score", "primary", "secondary", "cluster", "source"):
        assert field in first
    assert sum(f["count"] for f in payload["facets"]) == len(payload["entries"])


def test_search_missing_q_is_400(base_url):
    resp = requests.get(f"{base_url}/search")
    assert resp.status_code == 400
    assert "q" in resp.json()["error"]


def test_search_unknown_category_is_400(base_url):
    resp = requests.get(f"{base_url}/search", params={"q": "jaguar", "cats": "Top/Nope"})
    assert resp.status_code == 400
    assert "unknown category" in resp.json()["error"]


def test_search_bad_k_is_400(base_url):
    assert requests.get(f"{base_url}/search", params={"q": "x", "k": "abc"}).status_code == 400
    assert requests.get(f"{base_url}/search", params={"q": "x", "k": "0"}).status_code == 400


def test_search_category_filter(base_url):
    resp = requests.get(
        f"{base_url}/search", params={"q": "jaguar", "cats": "Top/Science"}
    )
    assert resp.status_code == 200
    for entry in resp.json()["entries"]:
        cats = [entry["primary"]] + ([entry["secondary"]] if entry["secondary"] else [])
        assert any(c.startswith("Top/Science") for c in cats)


def test_search_no_backends_is_503(base_url):
    resp = requests.get(f"{base_url}/search", params={"q": "jaguar", "sources": "desktop"})
    assert resp.status_code == 503


def test_categories_tree_matches_taxonomy(base_url, tmp_path):
    resp = requests.get(f"{base_url}/categories")
    assert resp.status_code == 200
    tree = resp.json()
    assert tree["path"] == "Top"
    tops = {child["path"] for child in tree["children"]}
    assert tops == {"Top/Science", "Top/Arts", "Top/Sports", "Top/Recreation"}
    science = next(c for c in tree["children"] if c["path"] == "Top/Science")
    assert {c["path"] for c in science["children"]} == {
        "Top/Science/Biology", "Top/Science/Environment",
    }


def test_profile_roundtrip(base_url):
    resp = requests.get(f"{base_url}/profile", params={"user": "alice"})
    assert resp.status_code == 200
    assert resp.json()["weights"] == {}

    resp = requests.post(
        f"{base_url}/profile",
        json={"user": "alice", "topics": {"Top/Science/Biology": 4}},
    )
    assert resp.status_code == 200
    resp = requests.get(f"{base_url}/profile", params={"user": "alice"})
    assert resp.json()["weights"] == {"Top/Science/Biology": 4}


def test_profile_post_invalid_topic_is_400(base_url):
    resp = requests.post(
        f"{base_url}/profile", json={"user": "alice", "topics": {"Top/Science": 1}}
    )
    assert resp.status_code == 400
    assert "invalid topic" in resp.json()["error"]


def test_visit_increments_profile(base_url):
    search = requests.get(f"{base_url}/search", params={"q": "jaguar"}).json()
    target = next(
        e for e in search["entries"] if e["primary"] == "Top/Science/Biology"
    )
    resp = requests.post(
        f"{base_url}/visit", json={"user": "bob", "url": target["url"]}
    )
    assert resp.status_code == 204
    profile = requests.get(f"{base_url}/profile", params={"user": "bob"}).json()
    assert profile["weights"]["Top/Science/Biology"] == 1

    resp = requests.post(
        f"{base_url}/visit", json={"user": "bob", "url": target["url"]}
    )
    assert resp.status_code == 204
    profile = requests.get(f"{base_url}/profile", params={"user": "bob"}).json()
    assert profile["weights"]["Top/Science/Biology"] == 2


def test_visit_unknown_reference_is_404(base_url):
    resp = requests.post(
        f"{base_url}/visit", json={"user": "bob", "url": "http://never/served"}
    )
    assert resp.status_code == 404


def test_visit_unclassified_is_noop(base_url):
    search = requests.get(f"{base_url}/search", params={"q": "zzzz xxxx"}).json()
    assert search["entries"][0]["primary"] == "Unclassified"
    resp = requests.post(
        f"{base_url}/visit", json={"user": "bob", "url": search["entries"][0]["url"]}
    )
    assert resp.status_code == 200
    assert resp.json()["noop"] is True


def test_visit_feedback_loop_promotes_topic(base_url):
    before = requests.get(f"{base_url}/search", params={"q": "jaguar", "user": "carfan"}).json()
    urls = [e["url"] for e in before["entries"]]
    assert urls.index("http://web/jaguar-animal") < urls.index("http://web/jaguar-car")

    for _ in range(2):
        resp = requests.post(
            f"{base_url}/visit", json={"user": "carfan", "url": "http://web/jaguar-car"}
        )
        assert resp.status_code == 204

    after = requests.get(f"{base_url}/search", params={"q": "jaguar", "user": "carfan"}).json()
    urls = [e["url"] for e in after["entries"]]
    assert urls.index("http://web/jaguar-car") < urls.index("http://web/jaguar-animal")


def test_concurrent_search_during_profile_updates(base_url):
    errors = []

    def searcher():
        for _ in range(15):
            resp = requests.get(f"{base_url}/search", params={"q": "jaguar", "user": "stress"})
            if resp.status_code != 200:
                errors.append(resp.status_code)

    def visitor():
        requests.get(f"{base_url}/search", params={"q": "jaguar"})
        for _ in range(15):
            resp = requests.post(
                f"{base_url}/visit", json={"user": "stress", "url": "http://web/jaguar-animal"}
            )
            if resp.status_code not in (200, 204):
                errors.append(resp.status_code)

    threads = [threading.Thread(target=searcher) for _ in range(3)]
    threads.append(threading.Thread(target=visitor))
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert errors == []
    profile = requests.get(f"{base_url}/profile", params={"user": "stress"}).json()
    assert profile["weights"]["Top/Science/Biology"] == 15


def test_static_ui_hosting(tmp_path, service):
    pipeline = build_pipeline(tmp_path)
    ui_dir = tmp_path / "ui"
    ui_dir.mkdir()
    (ui_dir / "index.html").write_text("<html><body>facets</body></html>", encoding="utf-8")
    (ui_dir / "app.js").write_text("console.log('ready');", encoding="utf-8")
    pipeline.config.ui_dir = str(ui_dir)
    base = service(pipeline)

    resp = requests.get(f"{base}/")
    assert resp.status_code == 200
    assert "facets" in resp.text
    resp = requests.get(f"{base}/app.js")
    assert resp.status_code == 200
    assert "javascript" in resp.headers["Content-Type"]
    assert requests.get(f"{base}/../etc/passwd").status_code in (400, 404)
    assert requests.get(f"{base}/missing.css").status_code == 404


def test_federation_remote_backend(tmp_path, service):
    upstream = service(build_pipeline(tmp_path / "up"))
    (tmp_path / "down").mkdir()
    downstream_pipeline = build_pipeline(tmp_path / "down")
    downstream_pipeline.backends = [RemoteBackend("peer", upstream, priority=0)]
    downstream_pipeline.config.sources = ["peer"]
    downstream = service(downstream_pipeline)

    resp = requests.get(f"{downstream}/search", params={"q": "jaguar", "sources": "peer"})
    assert resp.status_code == 200
    entries = resp.json()["entries"]
    assert entries
    assert all(e["source"] == "peer" for e in entries)
    urls = {e["url"] for e in entries}
    assert "http://web/jaguar-animal" in urls


def test_response_bytes_identical_across_requests(base_url):
    bodies = {
        requests.get(f"{base_url}/search", params={"q": "jaguar rainforest"}).content
        for _ in range(10)
    }
    assert len(bodies) == 1
