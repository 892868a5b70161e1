"""Bridge between wave-stimulus manifests and an encoder-decoder flow network."""

from .model import FlowEncoderDecoder, load_checkpoint, resolve_layer, save_checkpoint
from .rendering import AdapterConfig, read_manifest, render_wave, wave_to_tensor
from .respond import center_activations, render_and_respond
from .flows import flow_for_bars, read_stvl

__version__ = "0.1.0"
