import sys
import os

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.middleware.cors import CORSMiddleware
from fastapi.exceptions import RequestValidationError
import logging

from app.errors import ToolkitError
from app.report_store import report_store
from app.services.words_service import get_engine

# Import route modules
from app.routes import bar, combings, fillings, groups

# Initialize Logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

APP_VERSION = "v1.0.0"

# Initialize FastAPI
app = FastAPI(title="Filling and Combing Toolkit")

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)


# Logging Middleware
@app.middleware("http")
async def log_requests(request: Request, call_next):
    client_ip = request.client.host if request.client else "unknown"
    method = request.method
    url = request.url

    logger.info(f"📨 {method} {url} | Client: {client_ip}")

    try:
        response = await call_next(request)
        logger.info(f"✅ {method} {url} -> {response.status_code}")
        return response
    except Exception as e:
        logger.error(f"❌ {method} {url} failed: {str(e)}")
        raise


# Exception Handlers
@app.exception_handler(ToolkitError)
async def toolkit_exception_handler(request: Request, exc: ToolkitError):
    logger.error(f"❌ {type(exc).__name__} for {request.method} {request.url}: {exc.message}")
    return JSONResponse(status_code=exc.http_status, content={"detail": exc.message, "error": type(exc).__name__})


@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    logger.error(f"❌ Validation error for {request.method} {request.url}: {exc.errors()}")
    return JSONResponse(status_code=422, content={"detail": exc.errors()})


@app.exception_handler(Exception)
async def global_exception_handler(request: Request, exc: Exception):
    logger.exception(f"Unhandled error: {exc}")
    return JSONResponse(status_code=500, content={"detail": "Internal Server Error"})


@app.on_event("startup")
async def startup_event():
    logger.info(f"🚀 Starting toolkit API {APP_VERSION}...")
    try:
        report_store.connect()
    except OSError as e:
        logger.error(f"⚠️ Startup error: {str(e)}")


# ----------------- Base Routes -----------------
@app.get("/")
def root():
    return {"message": "Filling and Combing Toolkit API", "version": APP_VERSION}


@app.get("/health")
def health_check():
    return {
        "status": "healthy",
        "version": APP_VERSION,
        "report_dir": str(report_store.root) if report_store.root is not None else None,
        "cached_engines": get_engine.cache_info().currsize,
    }


# ----------------- Router Registration -----------------
app.include_router(groups.router, prefix="/api", tags=["Groups"])
app.include_router(fillings.router, prefix="/api", tags=["Fillings"])
app.include_router(combings.router, prefix="/api", tags=["Combings"])
app.include_router(bar.router, prefix="/api/bar", tags=["Bar Complex"])
