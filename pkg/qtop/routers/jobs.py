import logging

from fastapi import HTTPException, status

from qtop.models.job import JobSpec
from qtop.services.errors import QtopError
from qtop.services.jobs import JobRunner

logger = logging.getLogger(__name__)


def run_job(spec: JobSpec, action: str) -> dict:
    """Runs a job and maps domain errors onto HTTP statuses."""
    try:
        return JobRunner().run(spec)
    except QtopError as e:
        logger.error("%s rejected: %s", action, e)
        raise HTTPException(status_code=e.http_status, detail=str(e))
    except Exception as e:
        logger.exception("%s failed", action)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Failed to {action}: {str(e)}"
        )
