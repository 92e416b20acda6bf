from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from qtop.config import configure_logging
from qtop.routers import ado, health, invariants, jones, verify

configure_logging()

app = FastAPI(
    title="qtop",
    description="Quantum invariants of links and 3-manifolds at roots of unity",
    version="0.1.0"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(health.router)
app.include_router(jones.router)
app.include_router(ado.router)
app.include_router(invariants.router)
app.include_router(verify.router)


@app.get("/api")
def api_root():
    return {
        "message": "Welcome to the qtop API",
        "version": "0.1.0",
        "docs": "/docs"
    }
