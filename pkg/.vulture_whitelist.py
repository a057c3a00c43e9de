# Names used only by Jupyter, pytest or external callers.
from hololedger.euclidean import InfoReadout, MonteCarloSummary
from hololedger.holotn import ClassicalizedHologram, Layer, MeraNetwork, Site
from hololedger.measurement import PhaseRecord, ReadArchive, ReadResult, RegimeLedger
from hololedger.reports import Report
from hololedger.superselection import CellBasis, CoarseObservables

Report._repr_html_
RegimeLedger._repr_html_
ClassicalizedHologram._repr_html_
ClassicalizedHologram.joint_entropy
MeraNetwork.neighbors
MeraNetwork.single_site
CellBasis.edge_cells
CellBasis.save_csv
CoarseObservables.spectra
InfoReadout.b
MonteCarloSummary.var_SE
PhaseRecord.outcome
ReadArchive.partial
ReadResult.probabilities
Layer.disentanglers
Layer.isometries
Site.position
