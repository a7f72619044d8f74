from .qkd import (
    QkdConfig,
    QkdTranscript,
    decode_key_symbol,
    eve_entangle_measure,
    eve_intercept_resend,
    run_qkd,
)
from .remote import RemoteTransferConfig, RemoteTransferResult, run_remote_transfer
from .qecc import (
    QeccDemoConfig,
    QeccDemoResult,
    qecc_apply_noise,
    qecc_encode,
    qecc_recover,
    qecc_syndrome,
    run_qecc,
    stabilizer,
)

__all__ = [
    "QkdConfig",
    "QkdTranscript",
    "decode_key_symbol",
    "eve_entangle_measure",
    "eve_intercept_resend",
    "run_qkd",
    "RemoteTransferConfig",
    "RemoteTransferResult",
    "run_remote_transfer",
    "QeccDemoConfig",
    "QeccDemoResult",
    "qecc_apply_noise",
    "qecc_encode",
    "qecc_recover",
    "qecc_syndrome",
    "run_qecc",
    "stabilizer",
]
