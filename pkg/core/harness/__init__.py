from core.harness.instrumentation import PhaseInstrumentation, compute_counters, global_view
from core.harness.legality import LegalityReport, Violation, check_legal
from core.harness.corruption import (ScriptGenerator, ScriptApplier, script_for_level, generate_initial_state,
                                     all_single_mutations, random_keys)
from core.harness.runner import (RunStats, ClosureReport, run_until_legal, closure_probe, node_stats,
                                 metrics_document, summarize)
