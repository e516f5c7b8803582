"""HTTP chat client: payload shape, decoding config, retry behavior."""

import base64

import pytest

from failvis.endpoints import (
    ChatMessage,
    HttpChatEndpoint,
    ModelEndpointConfig,
    build_request_payload,
)
from failvis.errors import EndpointError
from failvis.symbols import encode_png

from .helpers import flat_frame
from .mock_server import CapturingChatServer


def _config(base_url, **kw):
    defaults = dict(
        base_url=base_url,
        model_name="test-model",
        timeout_s=5.0,
        max_retries=2,
        backoff_base_s=0.01,
    )
    defaults.update(kw)
    return ModelEndpointConfig(**defaults)


def test_decoding_defaults_pinned():
    cfg = ModelEndpointConfig(base_url="http://x", model_name="m")
    assert cfg.temperature == 0.0
    assert cfg.max_new_tokens == 2048
    logged = cfg.log_dict()
    assert logged["temperature"] == 0.0 and logged["max_new_tokens"] == 2048
    assert "api_key" not in str(logged).lower().replace("api_key_env_var", "")


def test_request_carries_temperature_and_max_tokens():
    with CapturingChatServer(reply="B") as server:
        endpoint = HttpChatEndpoint(_config(server.base_url))
        out = endpoint.complete([ChatMessage("user", "pick a letter")])
        assert out == "B"
        body = server.requests[0]["body"]
        assert body["temperature"] == 0
        assert body["max_tokens"] == 2048
        assert body["model"] == "test-model"
        assert server.requests[0]["path"].endswith("/chat/completions")


def test_images_encoded_as_data_urls():
    png = encode_png(flat_frame(w=8, h=6))
    payload = build_request_payload(
        _config("http://x"), [ChatMessage("user", "look", images=(png,))]
    )
    parts = payload["messages"][0]["content"]
    assert parts[0]["type"] == "image_url"
    url = parts[0]["image_url"]["url"]
    assert url.startswith("data:image/png;base64,")
    assert base64.b64decode(url.split(",", 1)[1]) == png
    assert parts[-1] == {"type": "text", "text": "look"}


def test_api_key_header_from_env(monkeypatch):
    monkeypatch.setenv("TEST_API_KEY", "sekrit")
    with CapturingChatServer() as server:
        endpoint = HttpChatEndpoint(_config(server.base_url, api_key_env_var="TEST_API_KEY"))
        endpoint.complete([ChatMessage("user", "x")])
        assert server.requests[0]["headers"].get("Authorization") == "Bearer sekrit"


def test_retries_on_429_then_succeeds():
    with CapturingChatServer(status_plan=[429, 500]) as server:
        endpoint = HttpChatEndpoint(_config(server.base_url))
        assert endpoint.complete([ChatMessage("user", "x")]) == "A"
        assert len(server.requests) == 3


def test_gives_up_after_max_retries():
    with CapturingChatServer(status_plan=[503, 503, 503]) as server:
        endpoint = HttpChatEndpoint(_config(server.base_url))
        with pytest.raises(EndpointError, match="after retries"):
            endpoint.complete([ChatMessage("user", "x")])
        assert len(server.requests) == 3  # initial + 2 retries


def test_non_retriable_status_raises_immediately():
    with CapturingChatServer(status_plan=[418]) as server:
        endpoint = HttpChatEndpoint(_config(server.base_url))
        with pytest.raises(EndpointError, match="418"):
            endpoint.complete([ChatMessage("user", "x")])
        assert len(server.requests) == 1


def test_unreachable_host_raises_endpoint_error():
    endpoint = HttpChatEndpoint(_config("http://127.0.0.1:9/v1", max_retries=0, timeout_s=0.2))
    with pytest.raises(EndpointError):
        endpoint.complete([ChatMessage("user", "x")])


def test_config_round_trip_from_json(tmp_path):
    path = tmp_path / "endpoint.json"
    path.write_text('{"base_url": "http://h/v1", "model_name": "m", "max_retries": 1}')
    cfg = ModelEndpointConfig.from_json_file(path)
    assert cfg.base_url == "http://h/v1" and cfg.max_retries == 1
    assert cfg.max_new_tokens == 2048
