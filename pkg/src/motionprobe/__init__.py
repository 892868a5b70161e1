"""motionprobe: what motion patterns is a filter bank tuned to?

Probe a bank of spatiotemporal filters with parametrized moving waves,
fit rectified Gabor response models to the measured tuning curves, and
analyze dilation/rotation/occlusion sensitivity and the aperture problem.
"""

from .volume import Volume, read_volume, write_volume
from .grids import (Axis, GridSpec, build_grid, grid_array, grid_size,
                    grid_spec_hash, parse_grid_spec, serialize_grid_spec,
                    translation_grid, dilation_grid, rotation_grid)
from .stimuli import (DEFAULT_EXTENT, AliasedStimulusError, DilatingWaveParams,
                      OcclusionParams, RotatingWaveParams, TranslatingWaveParams,
                      dilation_alias_check, gen_bar_sequence, gen_dilating_wave,
                      gen_occlusion_stimulus, gen_rotating_wave, gen_translating_wave,
                      probe_wave, rotate_coords, rotation_alias_check)
from .gabor import (Bandwidths, GaborParams, gabor_kernel, gaussian_envelope,
                    half_magnitude_bandwidths, load_bank_csv, preferred_velocity,
                    save_bank_csv, unit_response, wave_response_curve)
from .probe import (ResponseProvider, ResponseTable, SyntheticBank, active_filters,
                    export_manifest, export_responses, ingest_responses,
                    run_gridsearch, synthetic_respond)
from .fitting import (FitBounds, FitResult, PeakResponse, SpectralProfile,
                      extract_profiles, find_peak, fit_filter, fit_gabor,
                      normalized_cost)
from .spectral import (PhaseMap, ResponseMap, Spectrum, count_response_lobes,
                       dft3, dilation_sim_filter, freq_response_map, idft3,
                       occlusion_sim_filter, out_of_phase_fraction,
                       phase_difference, phase_map, rotation_sim_filter,
                       sim_time_origin, spectral_probe_grid,
                       translation_sim_filter, unit_response_spectral)
from .motion_search import (MotionPreference, admissibility,
                            compare_motion_preference, run_motion_gridsearch)
from .aperture import (DirectoryFlowSource, FlowMap, GroundTruthFlowSource,
                       center_error, epe, make_case, read_flo, run_sweep, write_flo)

__version__ = "0.1.0"
