# Signal sources: M-PSK constellations, Rayleigh channels, noise and dB units
