LLM_URL_ENV = "SPLITDIT_LLM_URL"
LLM_KEY_ENV = "SPLITDIT_LLM_KEY"
CACHE_ENV = "SPLITDIT_CACHE"

GRAPH_FILE = "graph.json"
SPLIT_FILE = "split.json"
SPLIT_TEXT_FILE = "split.txt"
INPUT_SEQUENCE_FILE = "input.tseq"
SCHEDULE_FILE = "schedule.json"
MANIFEST_FILE = "manifest.json"
CONFIG_FILE = "config.json"
REPORT_JSON_FILE = "report.json"
REPORT_TEXT_FILE = "report.txt"
LOSS_CURVE_FILE = "loss_curve.csv"
CHECKPOINT_FILE = "checkpoint.bin"
LATENT_FILE = "latent.tseq"
PROBE_TRACE_DIR = "traces/probe"
RUN_TRACE_DIR = "traces/run"
ABLATION_DIR = "ablation"

DIFFUSION_HORIZON = 1000

EXIT_OK = 0
EXIT_STAGE_FAILURE = 1
EXIT_USAGE = 2
