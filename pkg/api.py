from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from config import config
from errors import InvalidTableError, OntFactorError, ResourceError, StructuralError, TableParseError
from logging_config import get_logger
from models import AnalysisReport, BoundsReport, DataTable, OntFactorization, ValidationReport
from pydantic_models import (
    CompressRequest,
    CompressResponse,
    ErrorResponse,
    FactorizationPair,
    FactorRequest,
    RealizeResponse,
    TableName,
)
from services import OntologyService
from table_core import validate_table

logger = get_logger("ontfactor.api")

app = FastAPI(title=config.API_TITLE, version=config.API_VERSION, description=config.API_DESCRIPTION)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

service = OntologyService()


def status_for(exc: OntFactorError) -> int:
    if isinstance(exc, (TableParseError, StructuralError)):
        return 422
    if isinstance(exc, ResourceError):
        return 413
    return 400


@app.exception_handler(OntFactorError)
async def ontfactor_error_handler(request: Request, exc: OntFactorError):
    status = status_for(exc)
    logger.error("%s %s -> %d: %s", request.method, request.url.path, status, exc)
    body = ErrorResponse(error=type(exc).__name__, detail=str(exc), location=getattr(exc, "location", None))
    content = body.model_dump()
    if isinstance(exc, InvalidTableError) and exc.report is not None:
        content["report"] = exc.report.model_dump(mode="json")
    return JSONResponse(status_code=status, content=content)


@app.get("/manifest")
async def get_manifest():
    """Return the service manifest with available operations"""
    return {
        "name": config.API_TITLE,
        "version": config.API_VERSION,
        "description": config.API_DESCRIPTION,
        "tables": [name.value for name in TableName],
        "endpoints": [
            {"method": "GET", "path": "/tables/{name}", "description": "Generate a named data table"},
            {"method": "POST", "path": "/tables/validate", "description": "Validate a data table"},
            {"method": "POST", "path": "/tables/bounds", "description": "Bounds on the number of ontic states"},
            {"method": "POST", "path": "/factorizations", "description": "Build a model 1, 2 or 3 factorization"},
            {"method": "POST", "path": "/factorizations/verify", "description": "Check D = M P exactly"},
            {"method": "POST", "path": "/factorizations/compress", "description": "Method 1 or 2 compression"},
            {"method": "POST", "path": "/factorizations/analyze", "description": "psi-class, contextuality and deficiency"},
            {"method": "POST", "path": "/realizations", "description": "Quantum realization of a data table"},
        ],
    }


@app.get("/tables/{name}")
async def get_table(name: TableName, m: int = 3):
    table = service.generate(name.value, m=m)
    return table.model_dump(mode="json", exclude_none=True)


@app.post("/tables/validate", response_model=ValidationReport)
async def validate(table: DataTable):
    return validate_table(table)


@app.post("/tables/bounds", response_model=BoundsReport)
async def bounds(table: DataTable):
    return service.bounds(table)


@app.post("/factorizations", response_model=OntFactorization)
async def factor(request: FactorRequest):
    return service.factor(
        request.table,
        request.model,
        determinize_result=request.determinize,
        policy=request.policy,
        merge=request.merge,
    )


@app.post("/factorizations/verify", response_model=ValidationReport)
async def verify(request: FactorizationPair):
    return service.verify(request.table, request.factorization)


@app.post("/factorizations/compress", response_model=CompressResponse)
async def compress(request: CompressRequest):
    result = service.compress(
        request.table,
        request.factorization,
        request.method,
        params=request.params,
        exhaustive=request.exhaustive,
    )
    return CompressResponse(
        omega_before=request.factorization.omega,
        omega_after=result.omega,
        factorization=result,
    )


@app.post("/factorizations/analyze", response_model=AnalysisReport)
async def analyze(request: FactorizationPair):
    return service.analyze(request.table, request.factorization)


@app.post("/realizations", response_model=RealizeResponse)
async def realizations(table: DataTable):
    realization, error = service.realize(table)
    return RealizeResponse(
        realization=realization,
        max_error=error,
        within_tolerance=error <= config.REALIZATION_TOL,
    )
