import os
import logging
from datetime import datetime
from fastapi import FastAPI, HTTPException, Depends, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from dotenv import load_dotenv
from contextlib import asynccontextmanager

from config import API_CONFIG, LOGGING_CONFIG, load_settings
from engine import ReasoningEngine
from errors import EngineError
from models import (
    ChaseRequest,
    ChaseResponse,
    CheckRequest,
    CheckResponse,
    ForceRequest,
    ForceResponse,
    HealthResponse,
    MorleyizeRequest,
    MorleyizeResponse,
    OracleRequest,
    OracleResponse,
    ParseRequest,
    ParseResponse,
    ProveRequest,
    ProveResponse,
)

# Load environment variables
load_dotenv()

# Configure logging
logging.basicConfig(
    level=getattr(logging, LOGGING_CONFIG["level"]),
    format=LOGGING_CONFIG["format"]
)
logger = logging.getLogger(__name__)

# Global engine instance
engine = None

@asynccontextmanager
async def lifespan(app: FastAPI):
    # Startup
    global engine
    try:
        engine = ReasoningEngine(load_settings())
        logger.info(f"Reasoning engine initialized with {engine.settings}")
    except Exception as e:
        logger.error(f"Failed to initialize engine: {str(e)}")
        raise

    yield

    # Shutdown
    logger.info("Application shutting down")

app = FastAPI(
    title="Coherent Logic Reasoning Engine",
    description="Chase, dynamical proof search, Morleyization and forcing over coherent theories",
    version="1.0.0",
    lifespan=lifespan
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=API_CONFIG["cors_origins"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

def get_engine() -> ReasoningEngine:
    """Dependency to get the engine instance"""
    if engine is None:
        raise HTTPException(status_code=503, detail="Engine not initialized")
    return engine

@app.exception_handler(EngineError)
async def engine_error_handler(request: Request, exc: EngineError):
    logger.warning(f"{request.url.path} rejected: {exc}")
    return JSONResponse(status_code=422, content={"detail": str(exc)})

@app.get("/health", response_model=HealthResponse)
async def health_check():
    """Health check endpoint"""
    engine_status = engine.status if engine is not None else "unavailable"
    return HealthResponse(
        status="healthy",
        engine_status=engine_status,
        timestamp=datetime.now().isoformat()
    )

@app.post("/parse", response_model=ParseResponse)
async def parse_theory(request: ParseRequest, engine_instance: ReasoningEngine = Depends(get_engine)):
    return await run_in_threadpool(engine_instance.parse, request)

@app.post("/morleyize", response_model=MorleyizeResponse)
async def morleyize_theory(request: MorleyizeRequest, engine_instance: ReasoningEngine = Depends(get_engine)):
    return await run_in_threadpool(engine_instance.morleyize, request)

@app.post("/chase", response_model=ChaseResponse)
async def chase_diagram(request: ChaseRequest, engine_instance: ReasoningEngine = Depends(get_engine)):
    """Restricted chase of a diagram under a regular theory, with its trace"""
    return await run_in_threadpool(engine_instance.chase, request)

@app.post("/prove", response_model=ProveResponse)
async def prove_sequent(request: ProveRequest, engine_instance: ReasoningEngine = Depends(get_engine)):
    """
    Search for a dynamical cover with a uniform bar

    Returns certificates when every canonical part is proved, otherwise
    the open branch where the search stopped.
    """
    return await run_in_threadpool(engine_instance.prove, request)

@app.post("/check-cert", response_model=CheckResponse)
async def check_certificates(request: CheckRequest, engine_instance: ReasoningEngine = Depends(get_engine)):
    return await run_in_threadpool(engine_instance.check, request)

@app.post("/force", response_model=ForceResponse)
async def force_query(request: ForceRequest, engine_instance: ReasoningEngine = Depends(get_engine)):
    return await run_in_threadpool(engine_instance.force, request)

@app.post("/force/dot", response_class=PlainTextResponse)
async def force_query_dot(request: ForceRequest, engine_instance: ReasoningEngine = Depends(get_engine)):
    return await run_in_threadpool(engine_instance.force_dot, request)

@app.post("/oracle", response_model=OracleResponse)
async def oracle_check(request: OracleRequest, engine_instance: ReasoningEngine = Depends(get_engine)):
    """Brute-force validity over all small models of the theory"""
    return await run_in_threadpool(engine_instance.oracle, request)

@app.exception_handler(Exception)
async def global_exception_handler(request, exc):
    """Global exception handler"""
    logger.error(f"Unhandled exception: {str(exc)}")
    return JSONResponse(
        status_code=500,
        content={"detail": "Internal server error occurred"}
    )

if __name__ == "__main__":
    import uvicorn

    # Get configuration from environment (Render sets PORT automatically)
    host = os.getenv("HOST", API_CONFIG["default_host"])
    port = int(os.getenv("PORT", API_CONFIG["default_port"]))
    debug = os.getenv("DEBUG", "false").lower() == "true"
    environment = os.getenv("ENVIRONMENT", "development")

    logger.info(f"Starting server on {host}:{port} in {environment} mode")

    uvicorn.run(
        "main:app",
        host=host,
        port=port,
        reload=debug and environment == "development",
        log_level="info"
    )
