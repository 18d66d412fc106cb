import logging
import os
from pathlib import Path

from dotenv import load_dotenv
from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import ValidationError

from photodistill import __version__
from photodistill.errors import PhotodistillError
from photodistill.pipeline.run import run_characterize, run_extract, run_resources, run_simulate
from photodistill.render import to_report_md
from photodistill.resources import load_sources_csv
from photodistill.resources.sources import DATA_DIR
from photodistill.schemas import (
    CharacterizeRequest,
    ExtractRequest,
    ResourcesRequest,
    RunReport,
    SimulateRequest,
)

load_dotenv()

logging.basicConfig(level=(os.getenv("PHOTODISTILL_LOG_LEVEL") or "INFO").upper())
logger = logging.getLogger("photodistill.app")

MAX_PHOTONS = int(os.getenv("PHOTODISTILL_MAX_PHOTONS") or 8)
DEFAULT_SOURCE = (os.getenv("PHOTODISTILL_DEFAULT_SOURCE") or "fourier").strip().lower()
DATA_PATH = Path(os.getenv("PHOTODISTILL_DATA_DIR") or DATA_DIR)

app = FastAPI(title="photodistill", version=__version__)


def _guard(fn, req):
    try:
        return fn(req)
    except (PhotodistillError, ValidationError) as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.exception("request failed")
        raise HTTPException(status_code=500, detail=str(e))


def _simulate(req: SimulateRequest) -> RunReport:
    if req.n > MAX_PHOTONS:
        raise PhotodistillError(f"n={req.n} exceeds PHOTODISTILL_MAX_PHOTONS={MAX_PHOTONS}")
    if req.unitary_file is not None:
        # server never reads client-supplied paths
        raise PhotodistillError("unitary_file is not accepted over HTTP")
    return run_simulate(req, default_source=DEFAULT_SOURCE)


def _resources(req: ResourcesRequest) -> RunReport:
    if req.sources is None and DATA_PATH != DATA_DIR:
        req = req.model_copy(update={"sources": load_sources_csv(DATA_PATH / "sources.csv")})
    return run_resources(req)


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/simulate", response_model=RunReport)
def simulate(req: SimulateRequest):
    return _guard(_simulate, req)


@app.post("/characterize", response_model=RunReport)
def characterize(req: CharacterizeRequest):
    return _guard(run_characterize, req)


@app.post("/extract", response_model=RunReport)
def extract(req: ExtractRequest):
    return _guard(run_extract, req)


@app.post("/resources", response_model=RunReport)
def resources(req: ResourcesRequest):
    return _guard(_resources, req)


@app.post("/report-md", response_class=PlainTextResponse)
def report_md(report: RunReport):
    return to_report_md(report)
