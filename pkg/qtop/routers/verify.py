from fastapi import APIRouter, status

from qtop.models.computation import VerifyRequest, VerifyResponse
from qtop.models.job import Command, JobSpec
from qtop.models.report import CheckReport
from qtop.routers.jobs import run_job

router = APIRouter(
    prefix="/api",
    tags=["verify"]
)


@router.post("/verify", response_model=VerifyResponse, status_code=status.HTTP_200_OK)
def verify(request: VerifyRequest):
    """
    Runs a verification suite (or all of them) and returns the check reports.

    Suites that need 3-manifold constants are reported as skipped when r is
    divisible by 4.
    """
    spec = JobSpec(command=Command.VERIFY, r=request.r, suite=request.suite, knot=request.knot)
    result = run_job(spec, "run verification")
    reports = [CheckReport.model_validate(r) for r in result["reports"]]
    return VerifyResponse(passed=result["passed"], reports=reports)
