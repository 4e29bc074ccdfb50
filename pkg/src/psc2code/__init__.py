"""Toolkit for mining source code out of programming screencasts.

The pipeline turns a video (or a directory of pre-extracted frames) into
per-second frames, drops near-duplicate frames, classifies frames as
valid/invalid code views, locates the code-editor region, OCRs it,
corrects OCR errors with cross-frame evidence and a statistical code
model, and finally serves two applications over the result: a TF-IDF
video search engine and a workflow/timeline backend for an enhanced
video player.
"""

__version__ = "0.1.0"
