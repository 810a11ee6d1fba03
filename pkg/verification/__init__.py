# Runtime iteration monitor and brute-force oracles
