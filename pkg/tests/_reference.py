"""Frozen reference values used for arithmetic cross-checks.

Full-sample out-of-sample RMSE and MAE per model and asset (rounded to four
decimals), the reference improvement of VAR-t-LSTM over VAR in percent,
and the reference top-three of the combined ranking.
"""

ASSETS = ("ICLN", "QQQ", "SPY", "TAN", "XLE", "XLU")

RMSE = {
    "GRU":         (0.0204, 0.0157, 0.0134, 0.0268, 0.0235, 0.0133),
    "LSTM":        (0.0209, 0.0163, 0.0137, 0.0277, 0.0236, 0.0146),
    "MLP":         (0.0292, 0.0248, 0.0262, 0.0330, 0.0315, 0.0263),
    "SVR":         (0.0213, 0.0166, 0.0142, 0.0283, 0.0243, 0.0149),
    "VAR":         (0.0223, 0.0172, 0.0144, 0.0297, 0.0255, 0.0159),
    "VAR-GRU":     (0.0203, 0.0162, 0.0138, 0.0272, 0.0240, 0.0149),
    "VAR-LSTM":    (0.0204, 0.0154, 0.0130, 0.0268, 0.0233, 0.0135),
    "VAR-MLP":     (0.0220, 0.0174, 0.0149, 0.0282, 0.0241, 0.0154),
    "VAR-SVR":     (0.0219, 0.0170, 0.0142, 0.0294, 0.0251, 0.0153),
    "VAR-t":       (0.0219, 0.0172, 0.0143, 0.0293, 0.0252, 0.0156),
    "VAR-t-GRU":   (0.0169, 0.0136, 0.0116, 0.0224, 0.0207, 0.0129),
    "VAR-t-LSTM":  (0.0148, 0.0115, 0.0093, 0.0195, 0.0167, 0.0108),
    "VAR-t-MLP":   (0.0244, 0.0184, 0.0157, 0.0426, 0.0242, 0.0173),
    "VAR-t-SVR":   (0.0179, 0.0137, 0.0114, 0.0239, 0.0215, 0.0132),
}

MAE = {
    "GRU":         (0.0116, 0.0091, 0.0070, 0.0159, 0.0129, 0.0071),
    "LSTM":        (0.0126, 0.0097, 0.0076, 0.0174, 0.0137, 0.0081),
    "MLP":         (0.0192, 0.0165, 0.0172, 0.0227, 0.0208, 0.0176),
    "SVR":         (0.0140, 0.0112, 0.0091, 0.0196, 0.0154, 0.0092),
    "VAR":         (0.0160, 0.0124, 0.0098, 0.0220, 0.0176, 0.0106),
    "VAR-GRU":     (0.0130, 0.0104, 0.0083, 0.0181, 0.0147, 0.0088),
    "VAR-LSTM":    (0.0123, 0.0094, 0.0075, 0.0167, 0.0135, 0.0078),
    "VAR-MLP":     (0.0146, 0.0116, 0.0093, 0.0188, 0.0154, 0.0095),
    "VAR-SVR":     (0.0152, 0.0117, 0.0094, 0.0212, 0.0167, 0.0100),
    "VAR-t":       (0.0157, 0.0122, 0.0095, 0.0217, 0.0173, 0.0103),
    "VAR-t-GRU":   (0.0088, 0.0071, 0.0056, 0.0121, 0.0100, 0.0060),
    "VAR-t-LSTM":  (0.0079, 0.0061, 0.0048, 0.0107, 0.0088, 0.0054),
    "VAR-t-MLP":   (0.0135, 0.0106, 0.0085, 0.0206, 0.0142, 0.0093),
    "VAR-t-SVR":   (0.0105, 0.0081, 0.0063, 0.0147, 0.0119, 0.0071),
}

IMPROVEMENT_FULL_SAMPLE = (33.59, 33.14, 35.10, 34.27, 34.55, 31.65)

TOP3 = ("VAR-t-LSTM", "VAR-t-GRU", "VAR-t-SVR")
TOP3_AVG_RMSE_RANK = (1.00, 2.17, 2.83)
TOP3_AVG_MAE_RANK = (1.00, 2.00, 3.00)
TOP3_OVERALL = (1.00, 2.08, 2.92)
