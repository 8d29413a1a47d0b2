# Analysis: interference classification, power bounds, SER and energy efficiency
