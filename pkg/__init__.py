# municluster - clustering analysis of municipal indicators
