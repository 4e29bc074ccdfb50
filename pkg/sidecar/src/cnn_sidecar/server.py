"""HTTP face of a trained model, speaking the classifier wire protocol.

POST /classify takes {"t": int, "png_base64": str} and answers
{"t": int, "valid": bool, "confidence": float}; /classify_batch takes and
returns JSON arrays of the same shapes, preserving request order. Anything
malformed is a 400 whose detail names the offending field.
"""

from __future__ import annotations

import base64
import binascii
import io
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from PIL import Image

from .model import SidecarClassifier


def _decode_item(item, where: str) -> tuple[int, Image.Image]:
    if not isinstance(item, dict):
        raise HTTPException(400, f"{where}: expected an object, got {type(item).__name__}")
    missing = {"t", "png_base64"} - item.keys()
    if missing:
        raise HTTPException(400, f"{where}: missing field(s) {sorted(missing)}")
    t = item["t"]
    if isinstance(t, bool) or not isinstance(t, int):
        raise HTTPException(400, f"{where}: t must be an integer, got {t!r}")
    encoded = item["png_base64"]
    if not isinstance(encoded, str):
        raise HTTPException(400, f"{where}: png_base64 must be a string")
    try:
        raw = base64.b64decode(encoded, validate=True)
    except (binascii.Error, ValueError):
        raise HTTPException(400, f"{where}: png_base64 is not valid base64")
    try:
        image = Image.open(io.BytesIO(raw))
        image.load()
    except Exception:
        raise HTTPException(400, f"{where}: png_base64 does not decode to an image")
    return t, image


async def _json_body(request: Request):
    try:
        return await request.json()
    except Exception:
        raise HTTPException(400, "request body is not valid JSON")


def create_app(model_path: str | Path) -> FastAPI:
    classifier = SidecarClassifier.load(model_path)
    app = FastAPI(title="psc2code classifier sidecar")

    @app.get("/model")
    def model_info() -> dict:
        return classifier.meta.to_dict()

    @app.post("/classify")
    async def classify(request: Request) -> dict:
        t, image = _decode_item(await _json_body(request), "request")
        valid, confidence = classifier.classify([image])[0]
        return {"t": t, "valid": valid, "confidence": confidence}

    @app.post("/classify_batch")
    async def classify_batch(request: Request) -> list[dict]:
        body = await _json_body(request)
        if not isinstance(body, list):
            raise HTTPException(400, "classify_batch expects a JSON array")
        decoded = [_decode_item(item, f"item {i}") for i, item in enumerate(body)]
        if not decoded:
            return []
        verdicts = classifier.classify([image for _, image in decoded])
        return [{"t": t, "valid": valid, "confidence": confidence}
                for (t, _), (valid, confidence) in zip(decoded, verdicts)]

    return app
