# Data models module
