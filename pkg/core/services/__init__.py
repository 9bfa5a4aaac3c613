from core.services.scheduler import RoundScheduler, run_round
