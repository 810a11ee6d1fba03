# Batch runs, verification sweeps and reports
